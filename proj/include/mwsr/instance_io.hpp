// SPDX-License-Identifier: Apache-2.0
//
// JSON instance files:
//   { "K": 2, "nt": 4, "nr": 2, "power": 10.0, "weights": [1.0, 1.5],
//     "channels": [ [[ [re, im], ... nt ], ... nr ], ... K ] }
// Keys are written in that order; any order is accepted on input.
#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mwsr/channel.hpp"

namespace mwsr {

class InstanceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_instance(std::ostream& os, const ProblemInstance& inst)
{
    inst.validate();
    nlohmann::ordered_json j;
    j["K"] = inst.channels.users;
    j["nt"] = inst.channels.nt;
    j["nr"] = inst.channels.nr;
    j["power"] = inst.power;
    j["weights"] = inst.weights.weights;
    auto channels = nlohmann::ordered_json::array();
    for (const auto& h : inst.channels.channels) {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < h.cols(); ++c) row.push_back({h(r, c).real(), h(r, c).imag()});
            rows.push_back(std::move(row));
        }
        channels.push_back(std::move(rows));
    }
    j["channels"] = std::move(channels);
    os << j.dump(1) << '\n';
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) throw InstanceFormatError(std::string("instance: missing key '") + key + "'");
    return *it;
}

template <class T>
T require_number(const nlohmann::json& j, const char* what)
{
    if (!j.is_number()) throw InstanceFormatError(std::string("instance: '") + what + "' must be a number");
    return j.get<T>();
}

inline std::int64_t require_positive_int(const nlohmann::json& j, const char* what)
{
    if (!j.is_number_integer() || j.get<std::int64_t>() <= 0)
        throw InstanceFormatError(std::string("instance: '") + what + "' must be a positive integer");
    return j.get<std::int64_t>();
}

}  // namespace detail

inline ProblemInstance read_instance(std::istream& is, std::string label = {})
{
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InstanceFormatError(std::string("instance: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw InstanceFormatError("instance: top level must be an object");

    const auto k = static_cast<std::size_t>(detail::require_positive_int(detail::require_key(j, "K"), "K"));
    const auto nt = static_cast<Eigen::Index>(detail::require_positive_int(detail::require_key(j, "nt"), "nt"));
    const auto nr = static_cast<Eigen::Index>(detail::require_positive_int(detail::require_key(j, "nr"), "nr"));
    const double power = detail::require_number<double>(detail::require_key(j, "power"), "power");

    const auto& jw = detail::require_key(j, "weights");
    if (!jw.is_array() || jw.size() != k) throw InstanceFormatError("instance: 'weights' must hold K numbers");
    std::vector<double> weights;
    for (const auto& w : jw) weights.push_back(detail::require_number<double>(w, "weights[]"));

    const auto& jc = detail::require_key(j, "channels");
    if (!jc.is_array() || jc.size() != k) throw InstanceFormatError("instance: 'channels' must hold K matrices");
    ChannelSet cs{k, nt, nr, {}};
    for (const auto& jm : jc) {
        if (!jm.is_array() || jm.size() != static_cast<std::size_t>(nr))
            throw InstanceFormatError("instance: each channel must have nr rows");
        ComplexMatrix h(nr, nt);
        for (Eigen::Index r = 0; r < nr; ++r) {
            const auto& jr = jm[static_cast<std::size_t>(r)];
            if (!jr.is_array() || jr.size() != static_cast<std::size_t>(nt))
                throw InstanceFormatError("instance: each channel row must have nt entries");
            for (Eigen::Index c = 0; c < nt; ++c) {
                const auto& je = jr[static_cast<std::size_t>(c)];
                if (!je.is_array() || je.size() != 2)
                    throw InstanceFormatError("instance: channel entries must be [re, im] pairs");
                h(r, c) = Complex(detail::require_number<double>(je[0], "re"), detail::require_number<double>(je[1], "im"));
            }
        }
        cs.channels.push_back(std::move(h));
    }

    try {
        return make_instance(std::move(cs), weights, power, std::move(label));
    } catch (const std::invalid_argument& e) {
        throw InstanceFormatError(std::string("instance: ") + e.what());
    }
}

inline ProblemInstance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InstanceFormatError("cannot open instance file '" + path + "'");
    return read_instance(in, path);
}

inline void save_instance(const std::string& path, const ProblemInstance& inst)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
    write_instance(out, inst);
}

}  // namespace mwsr
