#include "icls/results_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace icls {

namespace {

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

bool significantly_worse(const SummaryRow& row, const std::vector<SummaryRow>& rows)
{
    if (!row.wilcoxon_p || *row.wilcoxon_p >= kSignificance) {
        return false;
    }
    for (const SummaryRow& other : rows) {
        if (other.method == Method::Supervised && other.unlabeled == row.unlabeled) {
            return row.mean_error > other.mean_error;
        }
    }
    return false;
}

}  // namespace

ResultFormat parse_format(std::string_view token)
{
    if (token == "csv") return ResultFormat::Csv;
    if (token == "jsonl") return ResultFormat::Jsonl;
    throw ContractError("unknown output format '" + std::string(token) + "' (expected csv or jsonl)");
}

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

std::string results_to_csv(const std::vector<RepeatResult>& results)
{
    std::ostringstream out;
    out << "dataset,method,L,U,repeat,error,test_loss,train_seconds,seed\n";
    for (const RepeatResult& r : results) {
        out << csv_field(r.dataset) << ',' << method_name(r.method) << ',' << r.labeled << ','
            << r.unlabeled << ',' << r.repeat << ',' << format_double(r.error) << ','
            << format_double(r.test_loss) << ',' << format_double(r.train_seconds) << ',' << r.seed
            << '\n';
    }
    return out.str();
}

std::string results_to_jsonl(const std::vector<RepeatResult>& results)
{
    std::string out;
    for (const RepeatResult& r : results) {
        nlohmann::ordered_json j;
        j["dataset"] = r.dataset;
        j["method"] = method_name(r.method);
        j["L"] = r.labeled;
        j["U"] = r.unlabeled;
        j["repeat"] = r.repeat;
        j["error"] = r.error;
        j["test_loss"] = r.test_loss;
        j["train_seconds"] = r.train_seconds;
        j["seed"] = r.seed;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "dataset,method,L,U,repeats,mean_error,se_error,mean_test_loss,se_test_loss,"
           "mean_train_seconds,worse_than_supervised,wilcoxon_p,significantly_worse\n";
    for (const SummaryRow& r : rows) {
        out << csv_field(r.dataset) << ',' << method_name(r.method) << ',' << r.labeled << ','
            << r.unlabeled << ',' << r.repeats << ',' << format_double(r.mean_error) << ','
            << format_double(r.se_error) << ',' << format_double(r.mean_loss) << ','
            << format_double(r.se_loss) << ',' << format_double(r.mean_seconds) << ',';
        if (r.worse_than_supervised) out << *r.worse_than_supervised;
        out << ',';
        if (r.wilcoxon_p) out << format_double(*r.wilcoxon_p);
        out << ',' << (significantly_worse(r, rows) ? "true" : "false") << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw std::runtime_error("cannot move results into " + path.string() + ": " + ec.message());
    }
}

}  // namespace icls
