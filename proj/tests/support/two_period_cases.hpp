#pragma once

#include <array>
#include <ostream>

#include "swing/contracts.hpp"

namespace swing::testing {

// Optimal rules of the two-period case analysis, one region per row, with
// V1 = +3 or -1 each w.p. 1/2 (E V1+ = 1.5, E V1- = 0.5, E V1 = 1).
struct CaseRow {
    const char* tile;
    GlobalConstraints q;
    double v0;
    double q0;
    double q1_up;    // purchase at date 1 when V1 >= 0
    double q1_down;  // purchase at date 1 when V1 < 0
};

inline constexpr double kUpValue = 3.0;
inline constexpr double kDownValue = -1.0;

inline constexpr std::array<CaseRow, 16> kTwoPeriodCases{{
    // T+_{00}: Q = (0.25, 0.75)
    {"T+00", {0.25, 0.75}, 2.0, 0.75, 0.0, 0.0},
    {"T+00", {0.25, 0.75}, 1.25, 0.25, 0.5, 0.0},
    {"T+00", {0.25, 0.75}, 0.5, 0.0, 0.75, 0.25},
    {"T+00", {0.25, 0.75}, -2.0, 0.0, 0.75, 0.25},
    // T+_{01}: Q = (0.25, 1.5)
    {"T+01", {0.25, 1.5}, 2.0, 1.0, 0.5, 0.0},
    {"T+01", {0.25, 1.5}, 0.75, 0.5, 1.0, 0.0},
    {"T+01", {0.25, 1.5}, -0.25, 0.25, 1.0, 0.0},
    {"T+01", {0.25, 1.5}, -1.0, 0.0, 1.0, 0.25},
    // T-_{01}: Q = (0.75, 1.25)
    {"T-01", {0.75, 1.25}, 2.0, 1.0, 0.25, 0.0},
    {"T-01", {0.75, 1.25}, 1.25, 0.75, 0.5, 0.0},
    {"T-01", {0.75, 1.25}, 0.5, 0.25, 1.0, 0.5},
    {"T-01", {0.75, 1.25}, -1.0, 0.0, 1.0, 0.75},
    // T+_{11}: Q = (1.25, 1.75)
    {"T+11", {1.25, 1.75}, 2.0, 1.0, 0.75, 0.25},
    {"T+11", {1.25, 1.75}, 1.25, 1.0, 0.75, 0.25},
    {"T+11", {1.25, 1.75}, 0.5, 0.75, 1.0, 0.5},
    {"T+11", {1.25, 1.75}, -1.0, 0.25, 1.0, 1.0},
}};

inline double case_value(const CaseRow& c) {
    return c.q0 * c.v0 + 0.5 * c.q1_up * kUpValue + 0.5 * c.q1_down * kDownValue;
}

inline void PrintTo(const CaseRow& c, std::ostream* os) {
    *os << c.tile << " Q=(" << c.q.lo << "," << c.q.hi << ") V0=" << c.v0;
}

}  // namespace swing::testing
