#include "nkt/theory.hpp"

#include "nkt/errors.hpp"

namespace nkt {

VariableId VariableDecl::id(const std::vector<int>& components) const {
    if (components.size() != ranges.size()) {
        throw DomainError(name + " takes " + std::to_string(ranges.size()) + " indices, got " +
                          std::to_string(components.size()));
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (!ranges[i].contains(components[i])) {
            throw DomainError("index " + std::to_string(components[i]) + " of " + name + " outside " +
                              std::to_string(ranges[i].lo) + ".." + std::to_string(ranges[i].hi));
        }
    }
    switch (kind) {
        case VarKind::Field: return VariableId::field(name, components, parity);
        case VarKind::Ghost: return VariableId::ghost(name, components, parity);
        case VarKind::StageGhost: return VariableId::stage_ghost(stage, name, components);
        default: throw DomainError("declarations are fields or ghosts");
    }
}

std::vector<VariableId> VariableDecl::all() const {
    std::vector<VariableId> out;
    std::vector<int> idx;
    for (const auto& r : ranges) idx.push_back(r.lo);
    while (true) {
        out.push_back(id(idx));
        std::size_t k = idx.size();
        while (k > 0) {
            --k;
            if (idx[k] < ranges[k].hi) {
                ++idx[k];
                break;
            }
            idx[k] = ranges[k].lo;
            if (k == 0) return out;
        }
        if (idx.empty()) return out;
    }
}

std::size_t ConstantTensor::volume() const {
    std::size_t v = 1;
    for (const auto& d : dims) v *= static_cast<std::size_t>(d.size());
    return v;
}

std::optional<Rational> ConstantTensor::at(std::span<const int> index) const {
    if (index.size() != dims.size()) return std::nullopt;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!dims[i].contains(index[i])) return std::nullopt;
        flat = flat * static_cast<std::size_t>(dims[i].size()) + static_cast<std::size_t>(index[i] - dims[i].lo);
    }
    return values.at(flat);
}

const VariableDecl* Theory::find_variable(std::string_view n) const {
    for (const auto& v : variables) {
        if (v.name == n) return &v;
    }
    return nullptr;
}

const ConstantTensor* Theory::find_constant(std::string_view n) const {
    for (const auto& [name, c] : constants) {
        if (name == n) return &c;
    }
    return nullptr;
}

std::vector<std::string> default_coordinates(int dim) {
    switch (dim) {
        case 1: return {"x"};
        case 2: return {"x", "y"};
        case 3: return {"x", "y", "z"};
        case 4: return {"t", "x", "y", "z"};
        default: {
            std::vector<std::string> out;
            for (int i = 0; i < dim; ++i) out.push_back("x" + std::to_string(i));
            return out;
        }
    }
}

}  // namespace nkt
