#include "depsearch/state.hpp"

#include <sstream>

namespace depsearch {

namespace {

void write_tuple(std::ostream& os, const Tuple& t) {
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) os << ',';
        os << t[i];
    }
    os << ')';
}

} // namespace

std::string serialize_extents(const std::map<std::string, Extent>& extents) {
    std::ostringstream os;
    bool first_component = true;
    for (const auto& [name, extent] : extents) {
        if (!first_component) os << ';';
        first_component = false;
        os << name << '=';
        if (const auto* set = std::get_if<SetExtent>(&extent)) {
            os << '{';
            bool first = true;
            for (const auto& row : set->rows) {
                if (!first) os << ',';
                first = false;
                write_tuple(os, row);
            }
            os << '}';
        } else if (const auto* map = std::get_if<MapExtent>(&extent)) {
            os << '{';
            bool first = true;
            for (const auto& [key, value] : map->entries) {
                if (!first) os << ',';
                first = false;
                write_tuple(os, key);
                os << "->";
                write_tuple(os, value);
            }
            os << '}';
        } else {
            const auto& cells = std::get<SetMapExtent>(extent).cells;
            os << '{';
            bool first = true;
            for (const auto& [key, cell] : cells) {
                if (!first) os << ',';
                first = false;
                write_tuple(os, key);
                os << "->{";
                bool first_el = true;
                for (const auto& el : cell) {
                    if (!first_el) os << ',';
                    first_el = false;
                    os << el;
                }
                os << '}';
            }
            os << '}';
        }
    }
    return std::move(os).str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

void collect_constants(const std::map<std::string, Extent>& extents,
                       const std::function<void(const std::string&, std::size_t, bool,
                                                const std::string&)>& sink) {
    for (const auto& [name, extent] : extents) {
        if (const auto* set = std::get_if<SetExtent>(&extent)) {
            for (const auto& row : set->rows)
                for (std::size_t i = 0; i < row.size(); ++i) sink(name, i, true, row[i]);
        } else if (const auto* map = std::get_if<MapExtent>(&extent)) {
            for (const auto& [key, value] : map->entries) {
                for (std::size_t i = 0; i < key.size(); ++i) sink(name, i, true, key[i]);
                for (std::size_t i = 0; i < value.size(); ++i) sink(name, i, false, value[i]);
            }
        } else {
            for (const auto& [key, cell] : std::get<SetMapExtent>(extent).cells) {
                for (std::size_t i = 0; i < key.size(); ++i) sink(name, i, true, key[i]);
                for (const auto& el : cell) sink(name, 0, false, el);
            }
        }
    }
}

} // namespace depsearch
