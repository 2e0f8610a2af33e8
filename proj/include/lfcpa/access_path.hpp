#pragma once

// Named abstract locations: access paths rooted at a variable or a heap
// allocation site, extended by field and array-offset segments. These are
// the currency of the whole analysis; everything here is a small value type.

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfcpa {

// Contract violations inside the engine. The CLI maps this to exit code 2.
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

// ---- Root: variable or heap site --------------------------------------

class Root {
public:
    static Root var(std::string name) {
        Root r;
        r.heap_ = false;
        r.name_ = std::move(name);
        return r;
    }
    static Root heap(int label) {
        Root r;
        r.heap_ = true;
        r.label_ = label;
        return r;
    }

    bool is_heap() const { return heap_; }
    const std::string& var_name() const { return name_; }
    int heap_label() const { return label_; }

    std::string render() const {
        return heap_ ? "o" + std::to_string(label_) : name_;
    }

    friend auto operator<=>(const Root&, const Root&) = default;

private:
    bool heap_ = false;
    int label_ = -1;      // heap site label (CFG node id of the malloc)
    std::string name_;    // variable name, empty for heap roots
};

// ---- Segment: field, constant offset, or unknown offset ----------------

class Segment {
public:
    enum class Kind { Field, Offset, Bottom };

    static Segment field(std::string name) {
        Segment s;
        s.kind_ = Kind::Field;
        s.field_ = std::move(name);
        return s;
    }
    static Segment offset(std::int64_t value) {
        Segment s;
        s.kind_ = Kind::Offset;
        s.off_ = value;
        return s;
    }
    static Segment bottom() {
        Segment s;
        s.kind_ = Kind::Bottom;
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_field() const { return kind_ == Kind::Field; }
    bool is_offset() const { return kind_ == Kind::Offset; }
    bool is_bottom() const { return kind_ == Kind::Bottom; }
    const std::string& field_name() const { return field_; }
    std::int64_t offset_value() const { return off_; }

    std::string render(bool ascii = false) const {
        switch (kind_) {
        case Kind::Field: return field_;
        case Kind::Offset: return std::to_string(off_);
        case Kind::Bottom: return ascii ? "bot" : "⊥";
        }
        return {};
    }

    // Position-wise compatibility: ⊥ stands for any element index, so it
    // matches every offset position; fields match only the same field.
    bool matches(const Segment& other) const {
        if (kind_ == Kind::Field || other.kind_ == Kind::Field)
            return kind_ == Kind::Field && other.kind_ == Kind::Field &&
                   field_ == other.field_;
        if (kind_ == Kind::Bottom || other.kind_ == Kind::Bottom) return true;
        return off_ == other.off_;
    }

    friend auto operator<=>(const Segment&, const Segment&) = default;

private:
    Kind kind_ = Kind::Field;
    std::string field_;
    std::int64_t off_ = 0;
};

// ---- AccessPath ---------------------------------------------------------

struct AccessPath {
    Root root;
    std::vector<Segment> segs;

    static AccessPath of_var(std::string name) {
        return AccessPath{Root::var(std::move(name)), {}};
    }
    static AccessPath of_heap(int label) {
        return AccessPath{Root::heap(label), {}};
    }

    AccessPath with(Segment s) const {
        AccessPath p = *this;
        p.segs.push_back(std::move(s));
        return p;
    }

    bool has_bottom() const {
        for (const auto& s : segs)
            if (s.is_bottom()) return true;
        return false;
    }

    std::string render(bool ascii = false) const {
        std::string out = root.render();
        for (const auto& s : segs) {
            out += '.';
            out += s.render(ascii);
        }
        return out;
    }

    friend auto operator<=>(const AccessPath&, const AccessPath&) = default;
};

// Heap location for an allocation site, named after its statement label.
inline AccessPath make_heap_loc(int label) {
    if (label <= 0) throw internal_error("heap location for label " + std::to_string(label));
    return AccessPath::of_heap(label);
}

// Two paths may denote the same cell: same root, same shape, and every
// position agrees (⊥ agreeing with any index). Equal-length only; a path
// and its prefix name different cells (the prefix is the whole aggregate).
inline bool overlaps(const AccessPath& a, const AccessPath& b) {
    if (a.root != b.root || a.segs.size() != b.segs.size()) return false;
    for (std::size_t i = 0; i < a.segs.size(); ++i)
        if (!a.segs[i].matches(b.segs[i])) return false;
    return true;
}

inline bool overlaps_any(const AccessPath& p, const std::set<AccessPath>& set) {
    for (const auto& q : set)
        if (overlaps(p, q)) return true;
    return false;
}

// ---- Target: a named location or the unknown pointee "?" ---------------

class Target {
public:
    static Target unknown() { return Target{}; }
    static Target loc(AccessPath p) {
        Target t;
        t.unknown_ = false;
        t.path_ = std::move(p);
        return t;
    }

    bool is_unknown() const { return unknown_; }
    const AccessPath& path() const {
        if (unknown_) throw internal_error("path() on unknown target");
        return path_;
    }

    std::string render(bool ascii = false) const {
        return unknown_ ? "?" : path_.render(ascii);
    }

    // Unknown sorts before every concrete location, matching "?" in renders.
    friend std::strong_ordering operator<=>(const Target& a, const Target& b) {
        if (a.unknown_ != b.unknown_)
            return a.unknown_ ? std::strong_ordering::less
                              : std::strong_ordering::greater;
        return a.path_ <=> b.path_;
    }
    friend bool operator==(const Target& a, const Target& b) {
        return (a <=> b) == std::strong_ordering::equal;
    }

private:
    bool unknown_ = true;
    AccessPath path_;
};

} // namespace lfcpa
