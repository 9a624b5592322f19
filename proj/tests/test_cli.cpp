// Copyright 2026 The statconc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "statconc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = statconc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) v.push_back(f);
    return v;
}

}  // namespace

using statconc::cli::kExitIo;
using statconc::cli::kExitOk;
using statconc::cli::kExitSelfCheck;
using statconc::cli::kExitUsage;

TEST_CASE("cli run", "[cli]") {
    const auto r = invoke({"run", "--alpha2", "0.5", "--n", "4"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("cumulative_probability 0.53125\n") != std::string::npos);
    CHECK(r.out.find("closed_form_cumulative 0.53125\n") != std::string::npos);
    CHECK(r.out.find("efficiency 0.25\n") != std::string::npos);

    const auto j = invoke({"run", "--alpha2", "0.5", "--n", "4", "--json"});
    REQUIRE(j.code == kExitOk);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["rounds"].size() == 4);
    CHECK(doc["cumulative_probability"].get<double>() == 0.53125);
    CHECK(doc["rounds"][0]["kept_probability"].get<double>() == 0.75);

    const auto absorbing = nlohmann::json::parse(invoke({"run", "--n", "4", "--detector", "absorbing", "--json"}).out);
    CHECK(absorbing["rounds"].size() == 3);

    const auto noflip = invoke({"run", "--alpha2", "0.5", "--n", "2", "--no-flip"});
    REQUIRE(noflip.code == kExitOk);
    CHECK(noflip.out.find("flip=off") != std::string::npos);
    CHECK(noflip.out.find("cumulative_probability 0.625\n") != std::string::npos);
}

TEST_CASE("cli usage errors", "[cli]") {
    CHECK(invoke({"run", "--alpha2", "1.01"}).code == kExitUsage);
    CHECK(invoke({"run", "--n", "0"}).code == kExitUsage);
    CHECK(invoke({"run", "--n", "11"}).code == kExitUsage);
    CHECK(invoke({"run", "--statistics", "anyon"}).code == kExitUsage);
    CHECK(invoke({"frobnicate"}).code == kExitUsage);
    CHECK(invoke({}).code == kExitUsage);
    CHECK(invoke({"sweep", "--n", "2,12"}).code == kExitUsage);
    CHECK(invoke({"sample", "--trials", "0"}).code == kExitUsage);
    // Absorbing with n = 1 measures nothing: a valid, empty run.
    const auto idle = nlohmann::json::parse(invoke({"run", "--n", "1", "--detector", "absorbing", "--json"}).out);
    CHECK(idle["rounds"].empty());
    CHECK(idle["cumulative_probability"].get<double>() == 1.0);
    const auto help = invoke({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("cli sweep", "[cli]") {
    const auto r = invoke({"sweep", "--n", "3"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 10);
    CHECK(ls[0] == statconc::cli::kSweepHeader);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        REQUIRE(f.size() == 12);
        CHECK(f[6] == f[7]);
    }
    CHECK(fields(ls[1])[0] == "0.1");
    CHECK(fields(ls[9])[0] == "0.9");

    const auto empty = invoke({"sweep", "--alpha2-min", "0.6", "--alpha2-max", "0.4"});
    REQUIRE(empty.code == kExitOk);
    CHECK(empty.out == std::string(statconc::cli::kSweepHeader) + "\n");

    const auto both = lines(invoke({"sweep", "--n", "1,2", "--statistics", "both", "--flip", "both"}).out);
    REQUIRE(both.size() == 1 + 9 * 2 * 2 * 2);
    for (std::size_t i = 1; i < both.size(); i += 4) {
        auto fermion = fields(both[i]), boson = fields(both[i + 2]);
        CHECK(fermion[3] == "fermion");
        CHECK(boson[3] == "boson");
        fermion.erase(fermion.begin() + 3);
        boson.erase(boson.begin() + 3);
        CHECK(fermion == boson);
    }

    const auto json = nlohmann::json::parse(invoke({"sweep", "--n", "2", "--format", "json"}).out);
    REQUIRE(json.size() == 9);
    CHECK(json[4]["alpha2"].get<double>() == 0.5);
    CHECK(json[4]["p_exact"].get<double>() == 0.625);

    CHECK(invoke({"sweep", "--out", "/nonexistent-dir/x.csv"}).code == kExitIo);
}

TEST_CASE("cli --out writes the file", "[cli]") {
    const auto path = std::filesystem::temp_directory_path() / "statconc_cli_test.csv";
    const auto r = invoke({"compare", "--out", path.string()});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(lines(buf.str()).size() == 100);
    std::filesystem::remove(path);
}

TEST_CASE("cli sample", "[cli]") {
    const auto a = invoke({"sample", "--alpha2", "0.3", "--n", "3", "--seed", "5", "--trials", "20000"});
    const auto b = invoke({"sample", "--alpha2", "0.3", "--n", "3", "--seed", "5", "--trials", "20000"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find("seed 5\n") != std::string::npos);

    const auto one = nlohmann::json::parse(invoke({"sample", "--trials", "1", "--json"}).out);
    const double e = one["estimate"].get<double>();
    CHECK((e == 0.0 || e == 1.0));

    CHECK(invoke({"sample", "--n", "2", "--self-check"}).code == kExitOk);
    // A single trial is almost surely more than 5 standard errors away or has zero error.
    const auto lone = invoke({"sample", "--trials", "1", "--alpha2", "0.5", "--n", "1", "--self-check"});
    CHECK(lone.code == kExitSelfCheck);
}

TEST_CASE("cli compare", "[cli]") {
    const auto r = invoke({"compare"});
    REQUIRE(r.code == kExitOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 100);
    CHECK(ls[0] == "alpha2,protocol,procrustean,asymptotic,ordered");
    CHECK(ls[50] == "0.5,0.25,1,1,true");
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i])[4] == "true");

    const auto single = lines(invoke({"compare", "--alpha2-min", "0.1", "--alpha2-max", "0.1"}).out);
    REQUIRE(single.size() == 2);
    CHECK(fields(single[1])[1] == "0.09");
    CHECK(fields(single[1])[2] == "0.2");

    CHECK(invoke({"compare", "--alpha2-min", "0", "--alpha2-max", "0.5"}).code == kExitUsage);
}

TEST_CASE("cli hom", "[cli]") {
    const auto boson = invoke({"hom", "--statistics", "boson"});
    REQUIRE(boson.code == kExitOk);
    CHECK(boson.out.find("bunch 1\n") != std::string::npos);
    CHECK(boson.out.find("antibunch 0\n") != std::string::npos);

    const auto fermion = invoke({"hom", "--statistics", "fermion"});
    CHECK(fermion.out.find("antibunch 1\n") != std::string::npos);
    CHECK(fermion.out.find("kept 1\n") != std::string::npos);

    for (const char* conv : {"real", "symmetric"}) {
        for (const char* st : {"fermion", "boson"}) {
            const auto j = nlohmann::json::parse(
                invoke({"hom", "--statistics", st, "--spin-right", "down", "--convention", conv, "--json"}).out);
            CHECK(std::abs(j["kept"].get<double>() - 0.5) < 1e-12);
            CHECK(std::abs(j["antibunch"].get<double>() - 0.5) < 1e-12);
        }
    }
}
