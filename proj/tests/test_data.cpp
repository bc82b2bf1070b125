#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "survbench/data.hpp"
#include "survbench/rng.hpp"

using namespace survbench;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

RawSurvivalTable raw_from_columns(const std::vector<std::vector<double>>& cols,
                                  const std::vector<ColumnKind>& kinds) {
    RawSurvivalTable t;
    const auto n = static_cast<Eigen::Index>(cols.front().size());
    const auto d = static_cast<Eigen::Index>(cols.size());
    t.X.resize(n, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < n; ++i)
            t.X(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    t.y = Eigen::VectorXd::Ones(n);
    t.delta = Eigen::VectorXi::Ones(n);
    for (Eigen::Index j = 0; j < d; ++j) t.names.push_back("c" + std::to_string(j));
    t.kinds = kinds;
    return t;
}

Dataset trivial_dataset(int n) {
    Dataset data;
    data.X.resize(n, 1);
    for (int i = 0; i < n; ++i) data.X(i, 0) = i;  // identifies rows
    data.y = Eigen::VectorXd::Ones(n);
    data.delta = Eigen::VectorXi::Ones(n);
    data.names = {"id"};
    data.kinds = {ColumnKind::continuous};
    return data;
}

}  // namespace

TEST_CASE("impute: continuous missing cells get the column median") {
    const auto raw = raw_from_columns({{1.0, kNaN, 3.0}}, {ColumnKind::continuous});
    const Dataset data = impute_missing(raw);
    CHECK(data.X(1, 0) == doctest::Approx(2.0));
    CHECK(data.X(0, 0) == 1.0);
    CHECK(data.X(2, 0) == 3.0);
}

TEST_CASE("impute: binary missing cells get the most frequent value") {
    const auto raw = raw_from_columns({{0.0, 1.0, 1.0, kNaN}}, {ColumnKind::binary});
    CHECK(impute_missing(raw).X(3, 0) == 1.0);
}

TEST_CASE("impute: binary mode ties break toward the smaller value") {
    const auto raw = raw_from_columns({{0.0, 1.0, kNaN}}, {ColumnKind::binary});
    CHECK(impute_missing(raw).X(2, 0) == 0.0);
}

TEST_CASE("impute: fully missing column is an error naming the column") {
    const auto raw = raw_from_columns({{kNaN, kNaN}}, {ColumnKind::continuous});
    CHECK_THROWS_WITH_AS(impute_missing(raw), "column 'c0' has no observed values", DataError);
}

TEST_CASE("impute: idempotent") {
    const auto raw = raw_from_columns({{1.0, kNaN, 3.0, kNaN}, {kNaN, 1.0, 0.0, 1.0}},
                                      {ColumnKind::continuous, ColumnKind::binary});
    const Dataset once = impute_missing(raw);
    RawSurvivalTable again;
    again.X = once.X;
    again.y = once.y;
    again.delta = once.delta;
    again.names = once.names;
    again.kinds = once.kinds;
    CHECK(impute_missing(again).X == once.X);
}

TEST_CASE("standardizer: mean and sd with divisor n-1, transform reuses train stats") {
    Dataset data;
    data.X.resize(3, 1);
    data.X << 1.0, 2.0, 3.0;
    data.y = Eigen::VectorXd::Ones(3);
    data.delta = Eigen::VectorXi::Ones(3);
    data.names = {"a"};
    data.kinds = {ColumnKind::continuous};

    const auto p = fit_standardizer(data);
    CHECK(p.means(0) == doctest::Approx(2.0));
    CHECK(p.sds(0) == doctest::Approx(1.0));

    const Dataset z = apply_standardizer(data, p);
    CHECK(z.X(0, 0) == doctest::Approx(-1.0));
    CHECK(z.X(1, 0) == doctest::Approx(0.0));
    CHECK(z.X(2, 0) == doctest::Approx(1.0));

    Dataset test = data;
    test.X.resize(1, 1);
    test.X << 4.0;
    test.y = Eigen::VectorXd::Ones(1);
    test.delta = Eigen::VectorXi::Ones(1);
    CHECK(apply_standardizer(test, p).X(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("standardizer: zero-variance continuous column errors with its name") {
    Dataset data;
    data.X = Eigen::MatrixXd::Constant(4, 1, 7.0);
    data.y = Eigen::VectorXd::Ones(4);
    data.delta = Eigen::VectorXi::Ones(4);
    data.names = {"flatline"};
    data.kinds = {ColumnKind::continuous};
    CHECK_THROWS_WITH_AS(fit_standardizer(data), "zero-variance continuous column 'flatline'",
                         DataError);
}

TEST_CASE("standardizer: binary untouched; standardized train column hits mean 0 sd 1") {
    Rng rng(11);
    const Eigen::Index n = 57;
    Dataset data;
    data.X.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.X(i, 0) = 3.0 + 2.5 * rng.normal();
        data.X(i, 1) = i % 3 == 0 ? 1.0 : 0.0;
    }
    data.y = Eigen::VectorXd::Ones(n);
    data.delta = Eigen::VectorXi::Ones(n);
    data.names = {"cont", "bin"};
    data.kinds = {ColumnKind::continuous, ColumnKind::binary};

    const Dataset z = apply_standardizer(data, fit_standardizer(data));
    CHECK(std::abs(z.X.col(0).mean()) < 1e-12);
    const double sd =
        std::sqrt((z.X.col(0).array() - z.X.col(0).mean()).square().sum() / double(n - 1));
    CHECK(std::abs(sd - 1.0) < 1e-12);
    CHECK(z.X.col(1) == data.X.col(1));
}

TEST_CASE("split: sizes follow round(n * fraction)") {
    const auto [train, test] = train_test_split(trivial_dataset(10), 0.3, 7);
    CHECK(train.n() == 7);
    CHECK(test.n() == 3);

    const auto [train2, test2] = train_test_split(trivial_dataset(286), 0.3, 0);
    CHECK(train2.n() == 200);
    CHECK(test2.n() == 86);
}

TEST_CASE("split: identical seed gives identical partition") {
    const auto a = train_test_split(trivial_dataset(50), 0.3, 123);
    const auto b = train_test_split(trivial_dataset(50), 0.3, 123);
    CHECK(a.first.X == b.first.X);
    CHECK(a.second.X == b.second.X);
}

TEST_CASE("split: disjoint exhaustive partition across 1000 seeds") {
    const Dataset data = trivial_dataset(23);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto [train, test] = train_test_split(data, 0.35, seed);
        std::set<int> seen;
        for (Eigen::Index i = 0; i < train.n(); ++i) seen.insert(int(train.X(i, 0)));
        for (Eigen::Index i = 0; i < test.n(); ++i) {
            REQUIRE(seen.insert(int(test.X(i, 0))).second);  // disjoint
        }
        REQUIRE(seen.size() == 23);  // exhaustive
    }
}

TEST_CASE("split: empty dataset rejected") {
    CHECK_THROWS_AS(train_test_split(trivial_dataset(0), 0.3, 0), DataError);
}

TEST_CASE("csv round trip with kind inference, overrides and missing cells") {
    const auto dir = std::filesystem::temp_directory_path() / "survbench_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "toy.csv").string();
    {
        std::ofstream out(path);
        out << "y,delta,age,sex\n"
               "12.5,1,33,1\n"
               "40,0,,0\n"
               "7,1,51,1\n";
    }
    const auto raw = load_survival_csv(path);
    CHECK(raw.n() == 3);
    CHECK(raw.names == std::vector<std::string>{"age", "sex"});
    CHECK(raw.kinds[0] == ColumnKind::continuous);
    CHECK(raw.kinds[1] == ColumnKind::binary);
    CHECK(std::isnan(raw.X(1, 0)));
    CHECK(raw.y(1) == 40.0);
    CHECK(raw.delta(1) == 0);

    const auto raw2 = load_survival_csv(path, {{"sex", ColumnKind::continuous}});
    CHECK(raw2.kinds[1] == ColumnKind::continuous);

    const Dataset data = impute_missing(raw);
    save_survival_csv((dir / "echo.csv").string(), data);
    const auto echo = impute_missing(load_survival_csv((dir / "echo.csv").string()));
    CHECK(echo.X == data.X);
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv: malformed inputs are data errors") {
    const auto dir = std::filesystem::temp_directory_path() / "survbench_csv_bad";
    std::filesystem::create_directories(dir);
    auto write_and_load = [&](const char* body) {
        const auto path = (dir / "bad.csv").string();
        std::ofstream(path) << body;
        return load_survival_csv(path);
    };
    CHECK_THROWS_AS(write_and_load("y,delta,a\n1,2,3\n"), DataError);   // delta not 0/1
    CHECK_THROWS_AS(write_and_load("y,delta,a\n-1,1,3\n"), DataError);  // negative duration
    CHECK_THROWS_AS(write_and_load("y,a\n1,3\n"), DataError);           // missing delta
    CHECK_THROWS_AS(write_and_load("y,delta,a\n1,1\n"), DataError);     // short row
    std::filesystem::remove_all(dir);
}

TEST_CASE("median and quantile conventions") {
    CHECK(median({1.0, 3.0}) == 2.0);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
}
