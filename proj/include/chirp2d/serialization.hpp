#pragma once

#include <string>
#include <string_view>

#include "chirp2d/estimator.hpp"
#include "chirp2d/montecarlo.hpp"
#include "chirp2d/signal_model.hpp"

namespace chirp2d {

// JSON documents. Readers throw FormatError (with the parser's byte
// position where there is one) on malformed or incomplete input.

/// {"components": [{"A","B","alpha","beta","gamma","delta"}, ...],
///  "noise": {"sigma", "seed"}}. "noise" is optional on input.
[[nodiscard]] std::string model_to_json(const ModelSpec& spec);
[[nodiscard]] ModelSpec model_from_json(std::string_view text);

/// Components with standard errors, power and flags, sigma2_hat, and the
/// per-stage optimizer diagnostics.
[[nodiscard]] std::string fit_to_json(const FitResult& fit);

/// {"model": <model document>, "sizes": [[M, N], ...], "sigmas": [...],
///  "replications", "base_seed", "estimator": "proposed" | "periodogram"}.
[[nodiscard]] std::string plan_to_json(const McPlan& plan);
[[nodiscard]] McPlan plan_from_json(std::string_view text);

} // namespace chirp2d
