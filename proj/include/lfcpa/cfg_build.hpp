#pragma once

// Control-flow graph construction. Statement nodes are labeled 1..N in
// source order (branch conditions get their own label); 0 is Start and N+1
// End. Branch nodes list the taken edge first. `return` jumps to End;
// a statement that cannot be reached is an error.

#include <string>
#include <vector>

#include "ast.hpp"
#include "ir.hpp"
#include "normalize.hpp"
#include "type_table.hpp"

namespace lfcpa {

namespace detail {

class CfgBuilder {
public:
    CfgBuilder(const NormalProc& proc, TypeTable& tt) : proc_(proc), tt_(tt) {}

    Cfg run() {
        int count = 0;
        count_stmts(proc_.body, count);

        cfg_.proc = proc_.name;
        cfg_.vars = proc_.vars;
        cfg_.start_id = 0;
        cfg_.end_id = count + 1;
        cfg_.nodes.resize(static_cast<std::size_t>(count) + 2);
        for (int i = 0; i <= count + 1; ++i) cfg_.node(i).id = i;
        cfg_.node(0).stmt.kind = Statement::Kind::Start;
        cfg_.node(0).stmt.text = "start";
        cfg_.node(cfg_.end_id).stmt.kind = Statement::Kind::End;
        cfg_.node(cfg_.end_id).stmt.text = "end";

        next_ = 1;
        std::vector<int> tails = wire(proc_.body, {0});
        connect(tails, cfg_.end_id);

        for (int id = 1; id <= count; ++id) {
            if (cfg_.node(id).preds.empty())
                throw parse_error(SrcLoc{0, 0},
                                  "unreachable statement: " + render(cfg_.node(id).stmt));
            if (cfg_.is_malloc_node(id)) {
                cfg_.malloc_sites.push_back(id);
                cfg_.heap_types[id] = cfg_.node(id).stmt.rhs.malloc_type;
            }
        }
        install_heap_types();
        return std::move(cfg_);
    }

private:
    const NormalProc& proc_;
    TypeTable& tt_;
    Cfg cfg_;
    int next_ = 1;

    static void count_stmts(const std::vector<NormalStmt>& body, int& n) {
        for (const auto& s : body) {
            ++n; // the statement itself, or the branch condition
            if (s.kind != NormalStmt::Kind::Stmt) {
                count_stmts(s.body, n);
                count_stmts(s.else_body, n);
            }
        }
    }

    void connect(const std::vector<int>& tails, int target) {
        for (int t : tails) {
            cfg_.node(t).succs.push_back(target);
            cfg_.node(target).preds.push_back(t);
        }
    }

    std::vector<int> wire(const std::vector<NormalStmt>& body,
                          std::vector<int> tails) {
        for (const auto& s : body) {
            if (tails.empty())
                throw parse_error(s.loc, "unreachable statement");
            int id = next_++;
            connect(tails, id);
            switch (s.kind) {
            case NormalStmt::Kind::Stmt:
                cfg_.node(id).stmt = s.stmt;
                if (s.stmt.is_return) {
                    connect({id}, cfg_.end_id);
                    tails.clear();
                } else {
                    tails = {id};
                }
                break;
            case NormalStmt::Kind::If: {
                cfg_.node(id).stmt = Statement::use(s.cond_exprs, s.cond_text);
                std::vector<int> then_t = wire(s.body, {id});
                std::vector<int> else_t =
                    s.else_body.empty() ? std::vector<int>{id}
                                        : wire(s.else_body, {id});
                tails = std::move(then_t);
                tails.insert(tails.end(), else_t.begin(), else_t.end());
                break;
            }
            case NormalStmt::Kind::While: {
                cfg_.node(id).stmt = Statement::use(s.cond_exprs, s.cond_text);
                std::vector<int> body_t = wire(s.body, {id});
                connect(body_t, id); // back edges
                tails = {id};        // fall-through edge fills in later
                break;
            }
            }
        }
        return tails;
    }

    void install_heap_types() {
        for (const auto& [label, type] : cfg_.heap_types)
            tt_.set_heap_type(label, type);
    }
};

} // namespace detail

inline Cfg build_cfg(const NormalProc& proc, TypeTable& tt) {
    return detail::CfgBuilder(proc, tt).run();
}

// Re-registers a graph's allocation-site types; needed before analyzing a
// procedure when several graphs share one table.
inline void install_heap_types(const Cfg& cfg, TypeTable& tt) {
    for (const auto& [label, type] : cfg.heap_types)
        tt.set_heap_type(label, type);
}

inline std::vector<Cfg> build_cfgs(const NormalProgram& prog, TypeTable& tt) {
    std::vector<Cfg> out;
    out.reserve(prog.procs.size());
    for (const auto& p : prog.procs) out.push_back(build_cfg(p, tt));
    return out;
}

} // namespace lfcpa
