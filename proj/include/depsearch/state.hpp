#pragma once

// Protection states and static extensions: concrete extents of model
// components. A state is a plain value; transitions copy it and apply
// updates, so states are safe to share between readers.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace depsearch {

using Tuple = std::vector<std::string>;

// Arity-1 sets and arity-n relations.
struct SetExtent {
    std::set<Tuple> rows;

    bool operator==(const SetExtent&) const = default;
};

// Scalar-valued finite mapping (partial; absent keys are undefined).
struct MapExtent {
    std::map<Tuple, Tuple> entries;

    bool operator==(const MapExtent&) const = default;
};

// Set-valued finite mapping (absent keys denote the empty set).
struct SetMapExtent {
    std::map<Tuple, std::set<std::string>> cells;

    bool operator==(const SetMapExtent&) const = default;
};

using Extent = std::variant<SetExtent, MapExtent, SetMapExtent>;

struct ModelState {
    std::map<std::string, Extent> extents;

    bool operator==(const ModelState&) const = default;
};

struct StaticExt {
    std::map<std::string, Extent> extents;

    bool operator==(const StaticExt&) const = default;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic one-line rendering, used for digests, duplicate detection and
// golden tests. Components appear in extent-map order, rows sorted.
std::string serialize_extents(const std::map<std::string, Extent>& extents);
inline std::string serialize_state(const ModelState& q) { return serialize_extents(q.extents); }

// FNV-1a, the digest used in witness files and state dedupe keys.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
inline std::string state_digest(const ModelState& q) { return hex64(fnv1a64(serialize_state(q))); }

// All constant values of the given extents, with the component they occur in.
void collect_constants(const std::map<std::string, Extent>& extents,
                       const std::function<void(const std::string& component, std::size_t position,
                                                bool in_key, const std::string& value)>& sink);

} // namespace depsearch
