#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "icls/results_io.hpp"
#include "json.hpp"

using namespace icls;
namespace fs = std::filesystem;

namespace {

std::vector<RepeatResult> sample_results()
{
    std::vector<RepeatResult> r;
    for (std::size_t rep = 0; rep < 3; ++rep) {
        for (Method m : {Method::Supervised, Method::Icls}) {
            RepeatResult row;
            row.dataset = "toy,set";
            row.method = m;
            row.labeled = 20;
            row.unlabeled = 8;
            row.repeat = rep;
            row.error = 0.1 * static_cast<double>(rep + 1) + (m == Method::Icls ? 0.05 : 0.0);
            row.test_loss = 1.0 / 3.0;
            row.seed = 12345678901234567890ull;
            r.push_back(row);
        }
    }
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest form")
{
    for (double v : {0.1, 1.0 / 3.0, 0.0, 1e-300, 123456.789, -2.5}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("CSV results")
{
    const std::string csv = results_to_csv(sample_results());
    std::istringstream in(csv);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "dataset,method,L,U,repeat,error,test_loss,train_seconds,seed");
    CHECK(first == "\"toy,set\",supervised,20,8,0,0.1,0.3333333333333333,0,12345678901234567890");
}

TEST_CASE("JSON-lines results carry the same fields")
{
    const auto results = sample_results();
    std::istringstream in(results_to_jsonl(results));
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.size() == 9);
        CHECK(j["dataset"] == results[k].dataset);
        CHECK(j["method"] == std::string(method_name(results[k].method)));
        CHECK(j["error"].get<double>() == results[k].error);
        CHECK(j["seed"].get<std::uint64_t>() == results[k].seed);
        ++k;
    }
    CHECK(k == results.size());
}

TEST_CASE("summary CSV")
{
    const auto rows = summarize(sample_results());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].worse_than_supervised == 3u);
    CHECK(rows[1].wilcoxon_p == 0.25);
    const std::string csv = summary_to_csv(rows);
    CHECK(csv.find("mean_error,se_error") != std::string::npos);
    CHECK(csv.find(",icls,20,8,3,") != std::string::npos);
}

TEST_CASE("format tokens")
{
    CHECK(parse_format("csv") == ResultFormat::Csv);
    CHECK(parse_format("jsonl") == ResultFormat::Jsonl);
    CHECK_THROWS_AS(parse_format("xml"), ContractError);
}

TEST_CASE("atomic writes")
{
    const fs::path dir = fs::temp_directory_path() / "icls_io_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path target = dir / "out.csv";
    write_file_atomic(target, "a\n");
    write_file_atomic(target, "b\n");
    CHECK(slurp(target) == "b\n");
    CHECK_FALSE(fs::exists(dir / "out.csv.tmp"));
    CHECK_THROWS(write_file_atomic(dir / "missing" / "out.csv", "x"));
    CHECK_FALSE(fs::exists(dir / "missing"));
}
