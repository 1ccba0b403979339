#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cpnet/model.hpp"

namespace cpnet::testing {

// Main: m=0, f=1. Wine: r=0, w=1. Meat is preferred; red under meat, white
// under fish.
inline CPNet dinner_net() {
    NetBuilder b;
    const auto main = b.add("Main");
    const auto wine = b.add("Wine");
    b.unconditional(main, Value::Zero);
    b.conditional(wine, {main}, rules::pattern({Value::Zero}, Value::Zero, Value::One));
    auto net = b.build();
    net.set_value_labels({{"m", "f"}, {"r", "w"}});
    return net;
}

inline const Outcome mr = Outcome::parse("00");
inline const Outcome mw = Outcome::parse("01");
inline const Outcome fr = Outcome::parse("10");
inline const Outcome fw = Outcome::parse("11");

inline std::string data_file(const std::string& name) {
    std::ifstream in(std::string(CPNET_DATA_DIR) + "/" + name);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace cpnet::testing
