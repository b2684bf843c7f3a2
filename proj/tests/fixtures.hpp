#pragma once

#include "tgen/model.hpp"

namespace tgen::fixtures {

// 4 nodes, 3 edges, both branch edges guarded.
inline Cfg diamond() {
    Cfg c;
    c.nodes = {{"S1", "User submits form"},
               {"S2", "System validates input"},
               {"S3", "System shows error"},
               {"S4", "System saves record"}};
    c.edges = {{"S1", "S2", 1, std::nullopt},
               {"S2", "S3", 2, "input invalid"},
               {"S2", "S4", 2, "input valid"}};
    return c;
}

// S1 -> S2 -> S3 -> S2 back-edge.
inline Cfg cycle() {
    Cfg c;
    c.nodes = {{"S1", "Start session"}, {"S2", "Poll device"}, {"S3", "Store reading"}};
    c.edges = {{"S1", "S2", 1, std::nullopt},
               {"S2", "S3", 2, std::nullopt},
               {"S3", "S2", 3, std::nullopt}};
    return c;
}

// S1 -> S1 self-loop declared before S1 -> S2.
inline Cfg self_loop() {
    Cfg c;
    c.nodes = {{"S1", "Retry handshake"}, {"S2", "Open channel"}};
    c.edges = {{"S1", "S1", 1, std::nullopt}, {"S1", "S2", 2, std::nullopt}};
    return c;
}

inline Cfg single_node() {
    Cfg c;
    c.nodes = {{"S1", "System reboots"}};
    return c;
}

inline Cfg straight_line3() {
    Cfg c;
    c.nodes = {{"S1", "A"}, {"S2", "B"}, {"S3", "C"}};
    c.edges = {{"S1", "S2", 1, std::nullopt}, {"S2", "S3", 2, std::nullopt}};
    return c;
}

}  // namespace tgen::fixtures
