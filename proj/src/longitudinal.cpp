#include "survbench/longitudinal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "survbench/csv.hpp"
#include "survbench/rng.hpp"

namespace survbench {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kJitter = 1e-10;
}

LongitudinalSeries::LongitudinalSeries(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.empty()) throw DataError("series: must hold at least one point");
    if (times_.size() != values_.size()) throw DataError("series: times/values length mismatch");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]))
            throw DataError("series: times must be strictly increasing");
    }
}

WindowStats window_mean_slope(const LongitudinalSeries& series, double window_hours) {
    if (!(window_hours > 0.0)) throw DataError("window_mean_slope: window must be positive");
    std::vector<double> t, v;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.times()[i] >= -window_hours) {
            t.push_back(series.times()[i]);
            v.push_back(series.values()[i]);
        }
    }
    if (t.empty()) return {kNaN, kNaN};

    const double n = static_cast<double>(t.size());
    double mean_t = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mean_t += t[i];
        mean_v += v[i];
    }
    mean_t /= n;
    mean_v /= n;
    if (t.size() < 2) return {mean_v, kNaN};

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - mean_t) * (t[i] - mean_t);
        sxy += (t[i] - mean_t) * (v[i] - mean_v);
    }
    return {mean_v, sxy / sxx};
}

double last_value(const LongitudinalSeries& series) { return series.values().back(); }

double gp_log_marginal(const Eigen::VectorXd& times, const Eigen::VectorXd& resid,
                       double const_var, double rbf_var, double rbf_len, double noise_var) {
    const Eigen::Index m = times.size();
    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double dt = times(i) - times(j);
            K(i, j) = const_var + rbf_var * std::exp(-dt * dt / (2.0 * rbf_len * rbf_len));
        }
        K(i, i) += noise_var + kJitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();

    const Eigen::VectorXd alpha = llt.solve(resid);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * resid.dot(alpha) - 0.5 * logdet -
           0.5 * static_cast<double>(m) * std::log(2.0 * M_PI);
}

Eigen::Vector4d gp_log_marginal_gradient(const Eigen::VectorXd& times,
                                         const Eigen::VectorXd& resid, double const_var,
                                         double rbf_var, double rbf_len, double noise_var) {
    const Eigen::Index m = times.size();
    Eigen::MatrixXd K(m, m), rbf(m, m), dlen(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double dt2 = (times(i) - times(j)) * (times(i) - times(j));
            rbf(i, j) = std::exp(-dt2 / (2.0 * rbf_len * rbf_len));
            dlen(i, j) = rbf_var * rbf(i, j) * dt2 / (rbf_len * rbf_len * rbf_len);
            K(i, j) = const_var + rbf_var * rbf(i, j);
        }
        K(i, i) += noise_var + kJitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw NumericalError("gp_log_marginal_gradient: kernel not positive definite");
    const Eigen::VectorXd alpha = llt.solve(resid);
    const Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    // dL/dtheta = 0.5 * tr((alpha alpha' - K^-1) dK/dtheta)
    const Eigen::MatrixXd inner = alpha * alpha.transpose() - Kinv;
    Eigen::Vector4d g;
    g(0) = 0.5 * inner.sum();                              // dK/dconst_var = ones
    g(1) = 0.5 * inner.cwiseProduct(rbf).sum();            // dK/drbf_var
    g(2) = 0.5 * inner.cwiseProduct(dlen).sum();           // dK/drbf_len
    g(3) = 0.5 * inner.trace();                            // dK/dnoise_var = identity
    return g;
}

namespace {

// Nelder-Mead simplex descent; good enough for the 4-parameter kernel
// problems this module produces.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double initial_step, int max_evals,
                            double* best_value) {
    const Eigen::Index d = x0.size();
    const auto np = static_cast<std::size_t>(d) + 1;
    std::vector<Eigen::VectorXd> xs(np, x0);
    std::vector<double> fs(np);
    int evals = 0;
    for (std::size_t i = 0; i < np; ++i) {
        if (i > 0) xs[i](static_cast<Eigen::Index>(i) - 1) += initial_step;
        fs[i] = f(xs[i]);
        ++evals;
    }

    while (evals < max_evals) {
        std::vector<std::size_t> rank(np);
        for (std::size_t i = 0; i < np; ++i) rank[i] = i;
        std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = rank[0], worst = rank[np - 1], second = rank[np - 2];

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < np; ++i) {
            if (i != worst) centroid += xs[i];
        }
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd refl = centroid + (centroid - xs[worst]);
        const double f_refl = f(refl);
        ++evals;
        if (f_refl < fs[best]) {
            const Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - xs[worst]);
            const double f_exp = f(exp_pt);
            ++evals;
            if (f_exp < f_refl) {
                xs[worst] = exp_pt;
                fs[worst] = f_exp;
            } else {
                xs[worst] = refl;
                fs[worst] = f_refl;
            }
        } else if (f_refl < fs[second]) {
            xs[worst] = refl;
            fs[worst] = f_refl;
        } else {
            const Eigen::VectorXd contr = centroid + 0.5 * (xs[worst] - centroid);
            const double f_contr = f(contr);
            ++evals;
            if (f_contr < fs[worst]) {
                xs[worst] = contr;
                fs[worst] = f_contr;
            } else {
                for (std::size_t i = 0; i < np; ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < np; ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    if (best_value) *best_value = fs[best];
    return xs[best];
}

}  // namespace

std::optional<GPHyperParams> gp_fit(const LongitudinalSeries& series, double window_hours,
                                    std::uint64_t seed) {
    if (!(window_hours > 0.0)) throw DataError("gp_fit: window must be positive");
    std::vector<double> tv, vv;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.times()[i] >= -window_hours) {
            tv.push_back(series.times()[i]);
            vv.push_back(series.values()[i]);
        }
    }
    if (tv.size() < 3) return std::nullopt;
    const auto m = static_cast<Eigen::Index>(tv.size());
    const Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(tv.data(), m);
    const Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(vv.data(), m);

    // linear mean by OLS, kernel fitted on the residuals
    const double mean_t = t.mean(), mean_v = v.mean();
    const double sxx = (t.array() - mean_t).square().sum();
    const double slope = ((t.array() - mean_t) * (v.array() - mean_v)).sum() / sxx;
    const double intercept = mean_v - slope * mean_t;
    const Eigen::VectorXd resid = v - (slope * t.array() + intercept).matrix();

    const auto objective = [&](const Eigen::VectorXd& log_theta) {
        for (Eigen::Index i = 0; i < 4; ++i) {
            if (std::abs(log_theta(i)) > 30.0) return std::numeric_limits<double>::infinity();
        }
        return -gp_log_marginal(t, resid, std::exp(log_theta(0)), std::exp(log_theta(1)),
                                std::exp(log_theta(2)), std::exp(log_theta(3)));
    };

    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta;
    for (int start = 0; start < 8; ++start) {
        Eigen::VectorXd theta0(4);
        theta0(0) = std::log(rng.log_uniform(1e-3, 1e1));   // const_var
        theta0(1) = std::log(rng.log_uniform(1e-3, 1e1));   // rbf_var
        theta0(2) = std::log(rng.log_uniform(1.0, 96.0));   // rbf_len (hours)
        theta0(3) = std::log(rng.log_uniform(1e-3, 1e1));   // noise_var
        if (!std::isfinite(objective(theta0))) continue;
        double value = 0.0;
        const Eigen::VectorXd theta = nelder_mead(objective, theta0, 0.25, 500, &value);
        if (value < best) {
            best = value;
            best_theta = theta;
        }
    }
    if (!std::isfinite(best)) return std::nullopt;

    GPHyperParams p;
    p.const_var = std::exp(best_theta(0));
    p.rbf_var = std::exp(best_theta(1));
    p.rbf_len = std::exp(best_theta(2));
    p.noise_var = std::exp(best_theta(3));
    p.mean_slope = slope;
    p.mean_intercept = intercept;
    return p;
}

LongitudinalPanel load_long_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw DataError(path + ": empty file");
    const auto& header = rows.front();
    int c_subj = -1, c_concept = -1, c_time = -1, c_value = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "subject_id") c_subj = static_cast<int>(j);
        else if (header[j] == "concept") c_concept = static_cast<int>(j);
        else if (header[j] == "time_hours") c_time = static_cast<int>(j);
        else if (header[j] == "value") c_value = static_cast<int>(j);
    }
    if (c_subj < 0 || c_concept < 0 || c_time < 0 || c_value < 0)
        throw DataError(path + ": need columns subject_id, concept, time_hours, value");

    std::map<std::string, std::map<std::string, std::vector<std::pair<double, double>>>> points;
    LongitudinalPanel panel;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size())
            throw DataError(path + ": row " + std::to_string(i + 1) + " has wrong field count");
        const std::string ctx = path + " row " + std::to_string(i + 1);
        const auto& subj = row[static_cast<std::size_t>(c_subj)];
        const auto& concept_name = row[static_cast<std::size_t>(c_concept)];
        const auto tval = csv::parse_double(row[static_cast<std::size_t>(c_time)], ctx);
        const auto vval = csv::parse_double(row[static_cast<std::size_t>(c_value)], ctx);
        if (!tval || !vval) throw DataError(ctx + ": time_hours and value must be numbers");
        if (points.find(subj) == points.end()) panel.subject_ids.push_back(subj);
        points[subj][concept_name].emplace_back(*tval, *vval);
    }

    for (auto& [subj, concepts] : points) {
        for (auto& [concept_name, pts] : concepts) {
            std::sort(pts.begin(), pts.end());
            std::vector<double> t, v;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                if (k > 0 && pts[k].first == pts[k - 1].first)
                    throw DataError(path + ": duplicate timestamp for subject '" + subj +
                                    "' concept '" + concept_name + "'");
                t.push_back(pts[k].first);
                v.push_back(pts[k].second);
            }
            panel.by_subject[subj].emplace(concept_name, LongitudinalSeries(std::move(t), std::move(v)));
        }
    }
    return panel;
}

std::vector<std::string> coverage_filter(const LongitudinalPanel& panel, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DataError("coverage_filter: threshold must lie in (0,1)");
    const double n_subjects = static_cast<double>(panel.by_subject.size());
    std::map<std::string, long> counts;
    for (const auto& [subj, concepts] : panel.by_subject) {
        for (const auto& [concept_name, series] : concepts) counts[concept_name] += 1;
    }
    std::vector<std::string> retained;
    for (const auto& [concept_name, count] : counts) {
        if (static_cast<double>(count) / n_subjects > threshold) retained.push_back(concept_name);
    }
    return retained;  // map iteration is already name-sorted
}

FeatureTable extract_features(const LongitudinalPanel& panel, double window_hours,
                              double coverage_threshold, std::uint64_t seed) {
    const auto concepts = coverage_filter(panel, coverage_threshold);
    FeatureTable table;
    table.subject_ids = panel.subject_ids;

    char wtag[32];
    std::snprintf(wtag, sizeof(wtag), "%g", window_hours);
    for (const auto& c : concepts) {
        table.names.push_back(c + "__mean" + wtag);
        table.names.push_back(c + "__slope" + wtag);
        table.names.push_back(c + "__last");
        table.names.push_back(c + "__gp_constvar");
        table.names.push_back(c + "__gp_rbfvar");
        table.names.push_back(c + "__gp_rbflen");
        table.names.push_back(c + "__gp_noisevar");
        table.names.push_back(c + "__gp_meanslope");
    }

    const auto n = static_cast<Eigen::Index>(table.subject_ids.size());
    table.values = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(table.names.size()), kNaN);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& subj = table.subject_ids[static_cast<std::size_t>(i)];
        const auto& concepts_of = panel.by_subject.at(subj);
        for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
            const auto it = concepts_of.find(concepts[ci]);
            if (it == concepts_of.end()) continue;
            const auto& series = it->second;
            const Eigen::Index base = static_cast<Eigen::Index>(8 * ci);
            const auto stats = window_mean_slope(series, window_hours);
            table.values(i, base + 0) = stats.mean;
            table.values(i, base + 1) = stats.slope;
            table.values(i, base + 2) = last_value(series);
            const auto gp = gp_fit(series, window_hours, mix_seed(seed, subj, concepts[ci]));
            if (gp) {
                table.values(i, base + 3) = gp->const_var;
                table.values(i, base + 4) = gp->rbf_var;
                table.values(i, base + 5) = gp->rbf_len;
                table.values(i, base + 6) = gp->noise_var;
                table.values(i, base + 7) = gp->mean_slope;
            }
        }
    }
    return table;
}

void save_feature_csv(const std::string& path, const FeatureTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    std::vector<std::string> header = {"subject_id"};
    header.insert(header.end(), table.names.begin(), table.names.end());
    csv::write_row(out, header);
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        std::vector<std::string> row = {table.subject_ids[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < table.values.cols(); ++j)
            row.push_back(csv::format(table.values(i, j)));
        csv::write_row(out, row);
    }
}

}  // namespace survbench
