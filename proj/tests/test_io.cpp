// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <nlohmann/json.hpp>

#include "mwsr/instance_io.hpp"
#include "mwsr/trace_csv.hpp"
#include "mwsr/harness.hpp"

using namespace mwsr;

namespace {

ProblemInstance sample_instance()
{
    return make_instance(generate_rayleigh_channels(3, 2, 2, 5), {1.0, 0.25, 2.0}, 7.5, "sample");
}

std::string serialized(const ProblemInstance& inst)
{
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

ProblemInstance parse(const std::string& text)
{
    std::istringstream is(text);
    return read_instance(is);
}

}  // namespace

TEST_CASE("instance JSON round trip", "[io]")
{
    const auto inst = sample_instance();
    const auto back = parse(serialized(inst));
    CHECK(back.users() == 3);
    CHECK(back.channels.nt == 2);
    CHECK(back.channels.nr == 2);
    CHECK(back.power == 7.5);
    CHECK(back.weights.weights == inst.weights.weights);
    CHECK(back.weights.order == inst.weights.order);
    for (std::size_t u = 0; u < 3; ++u) CHECK(back.channels.channels[u] == inst.channels.channels[u]);
    CHECK(serialized(back) == serialized(inst));
}

TEST_CASE("instance JSON key order and layout", "[io]")
{
    const auto text = serialized(sample_instance());
    const auto k = text.find("\"K\"");
    const auto nt = text.find("\"nt\"");
    const auto nr = text.find("\"nr\"");
    const auto power = text.find("\"power\"");
    const auto weights = text.find("\"weights\"");
    const auto channels = text.find("\"channels\"");
    CHECK(k < nt);
    CHECK(nt < nr);
    CHECK(nr < power);
    CHECK(power < weights);
    CHECK(weights < channels);

    const auto j = nlohmann::json::parse(text);
    CHECK(j["channels"].size() == 3);
    CHECK(j["channels"][0].size() == 2);     // nr rows
    CHECK(j["channels"][0][0].size() == 2);  // nt entries
    CHECK(j["channels"][0][0][0].size() == 2);
}

TEST_CASE("instance reader accepts any key order", "[io]")
{
    const auto inst = sample_instance();
    auto j = nlohmann::json::parse(serialized(inst));
    nlohmann::json reordered;
    for (const char* key : {"channels", "weights", "power", "nr", "nt", "K"}) reordered[key] = j[key];
    const auto back = parse(reordered.dump());
    CHECK(back.channels.channels[2] == inst.channels.channels[2]);
    CHECK(back.weights.weights == inst.weights.weights);
}

TEST_CASE("instance reader rejects malformed input", "[io]")
{
    const auto good = nlohmann::json::parse(serialized(sample_instance()));
    auto mutate = [&](auto&& f) {
        auto j = good;
        f(j);
        return j.dump();
    };

    CHECK_THROWS_AS(parse("{not json"), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j.erase("power"); })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["K"] = 0; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["K"] = 4; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["nt"] = 3; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["power"] = -1.0; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["power"] = "ten"; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["weights"][1] = -0.5; })), InstanceFormatError);
    CHECK_THROWS_AS(parse(mutate([](auto& j) { j["channels"][0][0][0] = {1.0}; })), InstanceFormatError);
    CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), InstanceFormatError);
}

TEST_CASE("trace number formatting", "[io]")
{
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(1.5) == "1.5");
    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
    CHECK(format_real(123456789012345.0) == "1.23456789012e+14");
    CHECK(format_real(-2.5e-7) == "-2.5e-07");
    CHECK(round_to_trace(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("trace CSV round trip", "[io]")
{
    ComplexGaussianSource src(8);
    std::vector<TraceRow> rows;
    for (std::size_t i = 0; i < 200; ++i) {
        IterationRecord r;
        r.iter = i + 1;
        r.objective = round_to_trace(40.0 * src.uniform());
        r.grad_norm = round_to_trace(std::exp(10.0 * (src.uniform() - 0.5)));
        r.armijo_m = i % 4;
        r.water_level = round_to_trace(src.uniform());
        r.max_delta = round_to_trace(std::pow(10.0, -12.0 * src.uniform()));
        r.elapsed_ms = i % 3 ? 0.0 : round_to_trace(1000.0 * src.uniform());
        rows.push_back({i / 50, 100 + i / 50, r});
    }
    std::stringstream ss;
    write_trace_csv(ss, rows);
    const auto text = ss.str();
    CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);

    const auto back = parse_trace_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);

    std::stringstream again;
    write_trace_csv(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("solver traces survive the CSV round trip", "[io]")
{
    ExperimentConfig cfg;
    cfg.users = 4;
    cfg.nt = 3;
    cfg.nr = 2;
    cfg.repetitions = 2;
    const auto out = run_experiment(cfg);
    std::stringstream ss;
    write_trace_csv(ss, out.rows);
    const auto back = parse_trace_csv(ss);
    REQUIRE(back.size() == out.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        const auto& a = back[i].record;
        const auto& b = out.rows[i].record;
        CHECK(back[i].run == out.rows[i].run);
        CHECK(back[i].seed == out.rows[i].seed);
        CHECK(a.iter == b.iter);
        CHECK(a.armijo_m == b.armijo_m);
        CHECK(a.objective == round_to_trace(b.objective));
        CHECK(a.grad_norm == round_to_trace(b.grad_norm));
        CHECK(a.water_level == round_to_trace(b.water_level));
        CHECK(a.max_delta == round_to_trace(b.max_delta));
    }
}

TEST_CASE("trace CSV parser rejects malformed input", "[io]")
{
    auto parse_text = [](const std::string& s) {
        std::istringstream is(s);
        return parse_trace_csv(is);
    };
    const std::string header = std::string(kTraceHeader) + "\n";
    CHECK(parse_text(header).empty());
    CHECK_THROWS(parse_text("run,seed\n"));
    CHECK_THROWS(parse_text(header + "0,1,1,2.5,1,0,0.1,0.2\n"));
    CHECK_THROWS(parse_text(header + "0,1,1,abc,1,0,0.1,0.2,0\n"));
    CHECK_NOTHROW(parse_text(header + "0,1,1,2.5,1,0,0.1,0.2,0\n"));
}
