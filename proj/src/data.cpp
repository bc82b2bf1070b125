#include "survbench/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "survbench/csv.hpp"
#include "survbench/rng.hpp"

namespace survbench {

std::string to_string(ColumnKind kind) {
    return kind == ColumnKind::continuous ? "continuous" : "binary";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "binary") return ColumnKind::binary;
    throw DataError("unknown column kind: '" + s + "'");
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.names = names;
    out.kinds = kinds;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    out.delta.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        out.y(static_cast<Eigen::Index>(i)) = y(rows[i]);
        out.delta(static_cast<Eigen::Index>(i)) = delta(rows[i]);
    }
    return out;
}

void Dataset::validate() const {
    const Eigen::Index d = X.cols();
    if (static_cast<Eigen::Index>(names.size()) != d ||
        static_cast<Eigen::Index>(kinds.size()) != d) {
        throw DataError("dataset: names/kinds length does not match covariate count");
    }
    if (y.size() != X.rows() || delta.size() != X.rows()) {
        throw DataError("dataset: y/delta length does not match row count");
    }
    for (Eigen::Index i = 0; i < n(); ++i) {
        if (!(y(i) >= 0.0) || !std::isfinite(y(i)))
            throw DataError("dataset: negative or non-finite duration at row " + std::to_string(i));
        if (delta(i) != 0 && delta(i) != 1)
            throw DataError("dataset: delta outside {0,1} at row " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < n(); ++i) {
            const double v = X(i, j);
            if (!std::isfinite(v))
                throw DataError("dataset: missing or non-finite value in column '" + names[j] + "'");
            if (kinds[j] == ColumnKind::binary && v != 0.0 && v != 1.0)
                throw DataError("dataset: non-{0,1} value in binary column '" + names[j] + "'");
        }
    }
}

double median(std::vector<double> values) {
    if (values.empty()) throw DataError("median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * values[lo] + w * values[hi];
}

namespace {

double impute_value(const Eigen::MatrixXd& X, Eigen::Index col, ColumnKind kind,
                    const std::string& name) {
    std::vector<double> observed;
    observed.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (!std::isnan(X(i, col))) observed.push_back(X(i, col));
    }
    if (observed.empty()) throw DataError("column '" + name + "' has no observed values");
    if (kind == ColumnKind::continuous) return median(std::move(observed));
    // most represented value, ties toward the smaller encoding
    std::size_t ones = 0;
    for (double v : observed) ones += (v == 1.0);
    return 2 * ones > observed.size() ? 1.0 : 0.0;
}

}  // namespace

Dataset impute_missing(const RawSurvivalTable& raw) {
    Dataset out;
    out.X = raw.X;
    out.y = raw.y;
    out.delta = raw.delta;
    out.names = raw.names;
    out.kinds = raw.kinds;
    for (Eigen::Index j = 0; j < out.X.cols(); ++j) {
        bool any_missing = false;
        for (Eigen::Index i = 0; i < out.X.rows(); ++i) {
            if (std::isnan(out.X(i, j))) {
                any_missing = true;
                break;
            }
        }
        if (!any_missing) continue;
        const double fill = impute_value(raw.X, j, raw.kinds[j], raw.names[j]);
        for (Eigen::Index i = 0; i < out.X.rows(); ++i) {
            if (std::isnan(out.X(i, j))) out.X(i, j) = fill;
        }
    }
    out.validate();
    return out;
}

StandardizationParams fit_standardizer(const Dataset& train) {
    const Eigen::Index n = train.n();
    if (n < 2) throw DataError("standardizer needs at least 2 training rows");
    StandardizationParams p;
    p.means = Eigen::VectorXd::Zero(train.dim());
    p.sds = Eigen::VectorXd::Ones(train.dim());
    for (Eigen::Index j = 0; j < train.dim(); ++j) {
        if (train.kinds[j] != ColumnKind::continuous) continue;
        const double mean = train.X.col(j).mean();
        const double ss = (train.X.col(j).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0))
            throw DataError("zero-variance continuous column '" + train.names[j] + "'");
        p.means(j) = mean;
        p.sds(j) = sd;
    }
    return p;
}

Dataset apply_standardizer(const Dataset& data, const StandardizationParams& params) {
    if (params.means.size() != data.dim())
        throw DataError("standardizer dimension mismatch");
    Dataset out = data;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        if (data.kinds[j] != ColumnKind::continuous) continue;
        out.X.col(j) = (data.X.col(j).array() - params.means(j)) / params.sds(j);
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
    const auto n = static_cast<int>(data.n());
    if (n == 0) throw DataError("cannot split an empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw DataError("test_fraction must lie in (0,1)");
    const auto n_test = static_cast<int>(std::llround(test_fraction * n));

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);

    std::vector<int> test_idx(idx.begin(), idx.begin() + n_test);
    std::vector<int> train_idx(idx.begin() + n_test, idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {data.subset(train_idx), data.subset(test_idx)};
}

RawSurvivalTable load_survival_csv(const std::string& path,
                                   const std::map<std::string, ColumnKind>& kind_overrides) {
    const auto rows = csv::read_file(path);
    if (rows.size() < 2) throw DataError(path + ": need a header row and at least one data row");
    const auto& header = rows.front();

    int y_col = -1, delta_col = -1;
    std::vector<int> cov_cols;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "y") y_col = static_cast<int>(j);
        else if (header[j] == "delta") delta_col = static_cast<int>(j);
        else cov_cols.push_back(static_cast<int>(j));
    }
    if (y_col < 0 || delta_col < 0) throw DataError(path + ": missing reserved column 'y' or 'delta'");

    RawSurvivalTable t;
    const auto n = static_cast<Eigen::Index>(rows.size() - 1);
    const auto d = static_cast<Eigen::Index>(cov_cols.size());
    t.X.resize(n, d);
    t.y.resize(n);
    t.delta.resize(n);
    for (int c : cov_cols) t.names.push_back(header[static_cast<std::size_t>(c)]);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i) + 1];
        if (row.size() != header.size())
            throw DataError(path + ": row " + std::to_string(i + 2) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(header.size()));
        const std::string ctx = path + " row " + std::to_string(i + 2);
        const auto yv = csv::parse_double(row[static_cast<std::size_t>(y_col)], ctx + " column y");
        if (!yv || !(*yv >= 0.0)) throw DataError(ctx + ": 'y' must be a non-negative number");
        t.y(i) = *yv;
        const auto dv =
            csv::parse_double(row[static_cast<std::size_t>(delta_col)], ctx + " column delta");
        if (!dv || (*dv != 0.0 && *dv != 1.0))
            throw DataError(ctx + ": 'delta' must be 0 or 1");
        t.delta(i) = static_cast<int>(*dv);
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto& field = row[static_cast<std::size_t>(cov_cols[static_cast<std::size_t>(j)])];
            const auto v = csv::parse_double(field, ctx + " column " + t.names[j]);
            t.X(i, j) = v ? *v : std::numeric_limits<double>::quiet_NaN();
        }
    }

    // kind inference: a column whose observed values are all in {0,1} is binary
    t.kinds.resize(t.names.size(), ColumnKind::continuous);
    for (Eigen::Index j = 0; j < d; ++j) {
        bool binary = true;
        for (Eigen::Index i = 0; i < n && binary; ++i) {
            const double v = t.X(i, j);
            if (!std::isnan(v) && v != 0.0 && v != 1.0) binary = false;
        }
        t.kinds[j] = binary ? ColumnKind::binary : ColumnKind::continuous;
        const auto it = kind_overrides.find(t.names[j]);
        if (it != kind_overrides.end()) t.kinds[j] = it->second;
    }
    return t;
}

void save_survival_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    std::vector<std::string> header = {"y", "delta"};
    header.insert(header.end(), data.names.begin(), data.names.end());
    csv::write_row(out, header);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        std::vector<std::string> row;
        row.push_back(csv::format(data.y(i)));
        row.push_back(std::to_string(data.delta(i)));
        for (Eigen::Index j = 0; j < data.dim(); ++j) row.push_back(csv::format(data.X(i, j)));
        csv::write_row(out, row);
    }
}

}  // namespace survbench
