#pragma once

// Fidelity of the in-place modular multiplication, evaluated by the
// structured evaluator in a translation unit built with aggressive
// floating-point flags (the criterion tolerance is 1e-2; the evaluator
// carries ~1e-5 of float noise, cross-checked against the dense
// gate-level simulation in the unit suite).

#include <cstdint>

double modmul_fidelity_fast(std::uint64_t c, std::uint64_t N, double eta, std::uint64_t x);
