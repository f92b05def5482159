#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "nkt/theory_dsl.hpp"

inline std::string theory_path(const std::string& name) { return std::string(NKT_THEORY_DIR) + "/" + name + ".nkt"; }

inline std::string read_theory_text(const std::string& name) {
    std::ifstream in(theory_path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nkt::Theory load_theory(const std::string& name) { return nkt::parse_theory(read_theory_text(name)); }
