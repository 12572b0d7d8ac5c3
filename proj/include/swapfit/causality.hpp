#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swapfit/series.hpp"

namespace swapfit {

// YtoX: lags of y help predict x (x is the target).
enum class Direction { YtoX, XtoY };
std::string to_string(Direction d);

struct GrangerResult {
    Direction direction = Direction::YtoX;
    std::size_t lag = 1;
    double f_stat = 0.0;
    double p_value = 1.0;
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
    std::size_t df_num = 0;
    std::size_t df_den = 0;
    std::vector<double> residuals;  // unrestricted model, one per usable observation
};

// Nested-model F-test. The restricted model is intercept plus target lags
// 1..lag; the unrestricted model adds source lags 1..lag.
GrangerResult granger_test(const SeriesPair& pair, Direction direction, std::size_t lag);

enum class PBracket { Below1, Interpolated, Above10 };
std::string to_string(PBracket b);

struct CriticalValues {
    double one = 0.0;
    double five = 0.0;
    double ten = 0.0;
};

// Constant-only Dickey-Fuller critical values, linear in 1/n between rows.
CriticalValues adf_critical_values(std::size_t nobs);

struct AdfResult {
    double t_stat = 0.0;
    std::size_t lag_order = 0;
    std::size_t nobs = 0;
    PBracket bracket = PBracket::Interpolated;
    double p_value = 0.0;  // 0.01 / 0.10 at the bracket edges
    CriticalValues critical{};
};

// dr_t = mu + rho r_{t-1} + sum_j phi_j dr_{t-j} + e_t;  t_stat = rho / se(rho).
AdfResult adf_test(std::span<const double> series, std::size_t lag_order);

// Lag minimising AIC over 0..max_lag, every candidate fitted on the sample
// usable at max_lag.
std::size_t select_adf_lag(std::span<const double> series, std::size_t max_lag = 8);

struct CausalityReport {
    std::vector<GrangerResult> granger;  // YtoX lags 1..max_lag, then XtoY
    AdfResult adf_y_to_x;                // residuals of the best YtoX lag
    AdfResult adf_x_to_y;
    std::size_t best_lag_y_to_x = 0;
    std::size_t best_lag_x_to_y = 0;
    bool bidirectional = false;
};

inline constexpr double kGrangerLevel = 0.05;

CausalityReport bidirectional_report(const SeriesPair& pair, std::size_t max_lag = 8);

// Human-readable table in the style of R's grangertest output.
std::string format_granger_table(const CausalityReport& report);

}  // namespace swapfit
