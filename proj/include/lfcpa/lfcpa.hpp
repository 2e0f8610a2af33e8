#pragma once

// Umbrella header: parse -> typecheck -> lower -> graphs, plus the analysis
// and interpreter entry points.

#include <memory>
#include <string>
#include <vector>

#include "access_path.hpp"
#include "ast.hpp"
#include "cfg_build.hpp"
#include "eval.hpp"
#include "extract.hpp"
#include "interp.hpp"
#include "ir.hpp"
#include "normalize.hpp"
#include "parser.hpp"
#include "pretty.hpp"
#include "solver.hpp"
#include "type_table.hpp"
#include "typecheck.hpp"

namespace lfcpa {

struct CompiledProgram {
    std::unique_ptr<TypeTable> types;
    SourceProgram ast;
    NormalProgram normal;
    std::vector<Cfg> cfgs;

    const Cfg& cfg(const std::string& proc) const {
        for (const auto& c : cfgs)
            if (c.proc == proc) return c;
        throw internal_error("no procedure named " + proc);
    }
    const Cfg& main() const { return cfg("main"); }
};

inline CompiledProgram compile(std::string source) {
    CompiledProgram out;
    ParseResult parsed = parse(std::move(source));
    out.types = std::move(parsed.types);
    out.ast = std::move(parsed.program);
    typecheck(out.ast, *out.types);
    out.normal = normalize(out.ast, *out.types);
    out.cfgs = build_cfgs(out.normal, *out.types);
    return out;
}

} // namespace lfcpa
