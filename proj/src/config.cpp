// SPDX-License-Identifier: Apache-2.0
//
// irssense: simulation and analysis toolkit for self-sensing IRS target localization
// Copyright (C) 2026 The irssense authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "irssense/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace irssense
{

namespace
{
namespace pt = boost::property_tree;

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Typed access to one section with unknown-key detection.
class Section
{
public:
    Section(std::string name, const pt::ptree &tree) : name_(std::move(name))
    {
        for (const auto &[k, v] : tree)
        {
            if (!v.empty())
                throw ConfigError(fmt::format("[{}] key '{}' has nested children", name_, k));
            values_[k] = trim(v.data());
        }
    }

    Section(std::string name, RawSection values) : name_(std::move(name)), values_(std::move(values)) {}

    template <typename Allowed> void check_keys(const Allowed &allowed) const
    {
        for (const auto &[k, v] : values_)
            if (std::find(std::begin(allowed), std::end(allowed), k) == std::end(allowed))
                throw ConfigError(fmt::format("unknown key '{}' in section [{}]", k, name_));
    }

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    const std::string &raw(const std::string &key) const { return values_.at(key); }
    const RawSection &all() const { return values_; }

    double number(const std::string &key) const { return parse_number(name_, key, raw(key)); }
    int integer(const std::string &key) const { return parse_integer(name_, key, raw(key)); }

    void set(const std::string &key, double &out) const
    {
        if (has(key))
            out = number(key);
    }
    void set(const std::string &key, int &out) const
    {
        if (has(key))
            out = integer(key);
    }
    void set_deg(const std::string &key, double &out) const
    {
        if (has(key))
            out = deg_to_rad(number(key));
    }
    bool boolean(const std::string &key) const
    {
        const std::string &v = raw(key);
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        throw ConfigError(fmt::format("[{}] {}: '{}' is not a boolean", name_, key, v));
    }

    static double parse_number(const std::string &sec, const std::string &key, const std::string &v)
    {
        try
        {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used == v.size())
                return d;
        }
        catch (const std::exception &)
        {
        }
        throw ConfigError(fmt::format("[{}] {}: '{}' is not a number", sec, key, v));
    }

    static int parse_integer(const std::string &sec, const std::string &key, const std::string &v)
    {
        try
        {
            std::size_t used = 0;
            const long long d = std::stoll(v, &used);
            if (used == v.size() && d >= std::numeric_limits<int>::min() && d <= std::numeric_limits<int>::max())
                return static_cast<int>(d);
        }
        catch (const std::exception &)
        {
        }
        throw ConfigError(fmt::format("[{}] {}: '{}' is not an integer", sec, key, v));
    }

private:
    std::string name_;
    RawSection values_;
};

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

const std::string kClutterPrefix = "clutter_";

void read_array(const Section &s, ArrayLayout &L)
{
    static const char *keys[] = {"n_elements", "n_vertical", "n_sensors", "element_spacing_m", "sensor_spacing_m",
                                 "wavelength_m"};
    s.check_keys(keys);
    s.set("n_elements", L.n_h);
    s.set("n_vertical", L.n_v);
    s.set("n_sensors", L.m);
    s.set("element_spacing_m", L.d_i);
    s.set("sensor_spacing_m", L.d_s);
    s.set("wavelength_m", L.wavelength);
}

void read_geometry(const Section &s, ScenarioConfig &cfg)
{
    static const char *keys[] = {"theta_deg", "theta_it_v_deg", "theta_ci_h_deg", "theta_ci_v_deg",
                                 "d_it_m",    "d_ci_m",         "d_ct_m",         "user_theta_deg"};
    s.check_keys(keys);
    s.set_deg("theta_deg", cfg.angles.theta_it_h);
    s.set_deg("theta_it_v_deg", cfg.angles.theta_it_v);
    s.set_deg("theta_ci_h_deg", cfg.angles.theta_ci_h);
    s.set_deg("theta_ci_v_deg", cfg.angles.theta_ci_v);
    s.set("d_it_m", cfg.d_it);
    s.set("d_ci_m", cfg.d_ci);
    if (s.has("d_ct_m"))
        cfg.d_ct = s.number("d_ct_m");
    s.set_deg("user_theta_deg", cfg.user_theta);
}

void read_target(const Section &s, ScenarioConfig &cfg)
{
    static const char *keys[] = {"kappa_dbsm"};
    s.check_keys(keys);
    if (s.has("kappa_dbsm"))
        cfg.kappa = dbsm_to_m2(s.number("kappa_dbsm"));
}

void read_link(const Section &s, ScenarioConfig &cfg)
{
    static const char *keys[] = {"tx_power_dbm", "noise_dbm", "snapshots", "eta_r"};
    s.check_keys(keys);
    if (s.has("tx_power_dbm"))
        cfg.tx_power = dbm_to_mw(s.number("tx_power_dbm"));
    if (s.has("noise_dbm"))
        cfg.noise_power = dbm_to_mw(s.number("noise_dbm"));
    s.set("snapshots", cfg.snapshots);
    s.set("eta_r", cfg.eta_r);
}

void read_estimation(const Section &s, ConfigFile &f)
{
    static const char *keys[] = {"grid_step_deg", "grid_min_deg", "grid_max_deg", "success_delta_rad", "refine_peak"};
    s.check_keys(keys);
    auto &e = f.context.estimator;
    s.set("grid_step_deg", e.grid_step_deg);
    s.set("grid_min_deg", e.grid_min_deg);
    s.set("grid_max_deg", e.grid_max_deg);
    s.set("success_delta_rad", f.context.cfg.success_delta);
    if (s.has("refine_peak"))
        e.refine_peak = s.boolean("refine_peak");
}

void read_crb(const Section &s, CrbSettings &crb)
{
    static const char *keys[] = {"c_index", "fading_draws"};
    s.check_keys(keys);
    if (s.has("c_index"))
    {
        const int one_based = s.integer("c_index");
        if (one_based < 1)
            throw ConfigError("[crb] c_index is one-based and must be >= 1");
        crb.c_index = one_based - 1;
    }
    s.set("fading_draws", crb.fading_draws);
}

ClutterSpec read_clutter(const Section &s, const std::string &name)
{
    static const char *keys[] = {"theta_h_deg", "theta_v_deg", "d_i_m", "d_c_m", "kappa_dbsm"};
    s.check_keys(keys);
    for (const char *req : {"theta_h_deg", "d_i_m", "kappa_dbsm"})
        if (!s.has(req))
            throw ConfigError(fmt::format("missing key {}.{}", name, req));
    ClutterSpec c;
    s.set_deg("theta_h_deg", c.theta_h);
    s.set_deg("theta_v_deg", c.theta_v);
    s.set("d_i_m", c.d_i);
    if (s.has("d_c_m"))
        c.d_c = s.number("d_c_m");
    c.kappa = dbsm_to_m2(s.number("kappa_dbsm"));
    return c;
}

PlanSection read_plan(const Section &s)
{
    static const char *keys[] = {"schemes", "trials", "seed", "sweep_param", "sweep_values", "output_csv", "workers"};
    s.check_keys(keys);
    PlanSection p;
    if (!s.has("schemes"))
        throw ConfigError("missing key plan.schemes");
    for (const auto &name : split_list(s.raw("schemes")))
        p.schemes.push_back(parse_scheme(name));
    s.set("trials", p.trials);
    if (s.has("seed"))
    {
        try
        {
            std::size_t used = 0;
            const std::string &v = s.raw("seed");
            if (!v.empty() && v[0] == '-')
                throw std::invalid_argument("negative");
            p.seed = std::stoull(v, &used, 0);
            if (used != v.size())
                throw std::invalid_argument("trailing");
        }
        catch (const std::exception &)
        {
            throw ConfigError(fmt::format("[plan] seed: '{}' is not an unsigned integer", s.raw("seed")));
        }
    }
    if (s.has("sweep_param"))
        p.sweep = parse_sweep(s.raw("sweep_param"));
    if (s.has("sweep_values"))
        for (const auto &v : split_list(s.raw("sweep_values")))
            p.sweep_values.push_back(Section::parse_number("plan", "sweep_values", v));
    if (p.sweep != SweepParam::none && p.sweep_values.empty())
        throw ConfigError("missing key plan.sweep_values");
    if (p.sweep == SweepParam::none && !p.sweep_values.empty())
        throw ConfigError("plan.sweep_values given without plan.sweep_param");
    if (s.has("output_csv"))
        p.output_csv = s.raw("output_csv");
    s.set("workers", p.workers);
    return p;
}

const char *kBsRequired[] = {"d_bi_m", "theta_i_deg", "theta_b_deg", "tx_antennas", "rx_antennas"};
const char *kBsKeys[] = {"d_bi_m", "theta_i_deg", "theta_b_deg", "tx_antennas", "rx_antennas", "bitib_grid_step_deg"};
const char *kMusKeys[] = {"d_ui_min_m", "d_ui_max_m"};
} // namespace

ConfigFile parse_config(std::istream &in)
{
    pt::ptree tree;
    try
    {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error &e)
    {
        throw ConfigError(fmt::format("malformed config (line {}): {}", e.line(), e.message()));
    }

    ConfigFile f;
    std::set<std::string> clutter_names;
    for (const auto &[name, child] : tree)
    {
        if (child.empty())
            throw ConfigError(fmt::format("key '{}' appears outside any section", name));
        const Section s(name, child);
        if (name == "array")
            read_array(s, f.context.cfg.layout);
        else if (name == "geometry")
            read_geometry(s, f.context.cfg);
        else if (name == "target")
            read_target(s, f.context.cfg);
        else if (name == "link")
            read_link(s, f.context.cfg);
        else if (name == "estimation")
            read_estimation(s, f);
        else if (name == "crb")
            read_crb(s, f.crb);
        else if (name == "bs")
        {
            s.check_keys(kBsKeys);
            f.bs = s.all();
        }
        else if (name == "mus")
        {
            s.check_keys(kMusKeys);
            f.mus = s.all();
        }
        else if (name == "plan")
            f.plan = read_plan(s);
        else if (name.rfind(kClutterPrefix, 0) == 0 && name.size() > kClutterPrefix.size())
            f.context.cfg.clutters.push_back(read_clutter(s, name));
        else
            throw ConfigError(fmt::format("unknown section [{}]", name));
    }
    f.context.cfg.validate();
    f.context.estimator.validate();
    if (f.crb.c_index && *f.crb.c_index >= f.context.cfg.layout.n_h)
        throw ConfigError(fmt::format("[crb] c_index {} exceeds n_elements {}", *f.crb.c_index + 1,
                                      f.context.cfg.layout.n_h));
    if (f.crb.fading_draws < 0)
        throw ConfigError("[crb] fading_draws must be >= 0");
    return f;
}

ConfigFile load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    try
    {
        return parse_config(in);
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

BsGeometry bs_geometry(const ConfigFile &file)
{
    if (!file.bs)
        throw ConfigError(fmt::format("missing key bs.{}", kBsRequired[0]));
    const Section s("bs", *file.bs);
    for (const char *req : kBsRequired)
        if (!s.has(req))
            throw ConfigError(fmt::format("missing key bs.{}", req));
    BsGeometry g;
    g.d_bi = s.number("d_bi_m");
    g.theta_i = deg_to_rad(s.number("theta_i_deg"));
    g.theta_b = deg_to_rad(s.number("theta_b_deg"));
    g.tx_antennas = s.integer("tx_antennas");
    g.rx_antennas = s.integer("rx_antennas");
    s.set("bitib_grid_step_deg", g.bitib_grid_step_deg);
    g.validate();
    return g;
}

MusGeometry mus_geometry(const ConfigFile &file)
{
    if (!file.mus)
        throw ConfigError(fmt::format("missing key mus.{}", kMusKeys[0]));
    const Section s("mus", *file.mus);
    for (const char *req : kMusKeys)
        if (!s.has(req))
            throw ConfigError(fmt::format("missing key mus.{}", req));
    MusGeometry g;
    g.d_ui_min = s.number("d_ui_min_m");
    g.d_ui_max = s.number("d_ui_max_m");
    g.validate();
    return g;
}

ExperimentPlan make_plan(const ConfigFile &file)
{
    if (!file.plan)
        throw ConfigError("missing section [plan]");
    const PlanSection &p = *file.plan;
    ExperimentPlan plan;
    plan.base = file.context;
    plan.crb = file.crb;
    plan.schemes = p.schemes;
    plan.trials = p.trials;
    plan.seed = p.seed;
    plan.sweep = p.sweep;
    plan.sweep_values = p.sweep_values;
    plan.output_csv = p.output_csv;
    plan.workers = p.workers;
    for (auto s : p.schemes)
    {
        if (uses_base_station(s) && !plan.base.bs)
            plan.base.bs = bs_geometry(file);
        if (s == SchemeId::mus && !plan.base.mus)
            plan.base.mus = mus_geometry(file);
    }
    plan.validate();
    return plan;
}

} // namespace irssense
