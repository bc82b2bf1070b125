#include "survbench/model_io.hpp"

namespace survbench {

namespace {

nlohmann::json named_coefficients(const Eigen::VectorXd& beta,
                                  const std::vector<std::string>& names) {
    if (static_cast<Eigen::Index>(names.size()) != beta.size())
        throw DataError("model_to_json: coefficient/name count mismatch");
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        arr.push_back({{"name", names[static_cast<std::size_t>(j)]}, {"value", beta(j)}});
    }
    return arr;
}

nlohmann::json penalty_to_json(const PenaltyConfig& p) {
    return {{"gamma", p.gamma}, {"eta", p.eta}};
}

}  // namespace

nlohmann::json curve_to_json(const StepSurvivalCurve& curve) {
    return {{"times", curve.times},
            {"survival", curve.survival},
            {"lower95", curve.lower95},
            {"upper95", curve.upper95}};
}

StepSurvivalCurve curve_from_json(const nlohmann::json& j) {
    StepSurvivalCurve c;
    c.times = j.at("times").get<std::vector<double>>();
    c.survival = j.at("survival").get<std::vector<double>>();
    c.lower95 = j.at("lower95").get<std::vector<double>>();
    c.upper95 = j.at("upper95").get<std::vector<double>>();
    return c;
}

nlohmann::json model_to_json(const FittedLinearModel& model,
                             const std::vector<std::string>& names) {
    return {{"mode", model.kind == LinearModelKind::logistic ? "logistic" : "svm"},
            {"penalty", penalty_to_json(model.penalty)},
            {"coefficients", named_coefficients(model.beta, names)},
            {"intercept", model.intercept}};
}

nlohmann::json model_to_json(const CoxModel& model, const std::vector<std::string>& names) {
    return {{"mode", "cox"},
            {"penalty", penalty_to_json(model.penalty)},
            {"coefficients", named_coefficients(model.beta, names)},
            {"baseline", {{"times", model.baseline.times},
                          {"cumulative", model.baseline.cumulative}}}};
}

nlohmann::json model_to_json(const MixtureDurationModel& model,
                             const std::vector<std::string>& names) {
    return {{"mode", model.mode == MixtureMode::cure ? "cure" : "cmix"},
            {"penalty", penalty_to_json(model.penalty)},
            {"coefficients", named_coefficients(model.beta, names)},
            {"intercept", model.intercept},
            {"rate_high", model.rate_high},
            {"rate_low", model.rate_low},
            {"km_high", curve_to_json(model.km_high)},
            {"km_low", curve_to_json(model.km_low)}};
}

}  // namespace survbench
