// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#include "discovery/discovery.h"

#include <chrono>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "discovery/chain.hpp"
#include "discovery/error.hpp"
#include "discovery/harness.hpp"
#include "discovery/model_space.hpp"
#include "discovery/verify.hpp"

struct dsc_space
{
    discovery::ModelSpace space;
};

struct dsc_config
{
    discovery::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

class InvalidArgument : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class BufferTooSmall : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

template <class F>
int guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return DSC_OK;
    } catch (const InvalidArgument& e) {
        g_last_error = e.what();
        return DSC_ERR_INVALID_ARGUMENT;
    } catch (const BufferTooSmall& e) {
        g_last_error = e.what();
        return DSC_ERR_BUFFER_TOO_SMALL;
    } catch (const discovery::ConfigError& e) {
        g_last_error = e.what();
        return DSC_ERR_CONFIG;
    } catch (const discovery::IoError& e) {
        g_last_error = e.what();
        return DSC_ERR_IO;
    } catch (const discovery::FitError& e) {
        g_last_error = e.what();
        return DSC_ERR_FIT;
    } catch (const discovery::GenerationError& e) {
        g_last_error = e.what();
        return DSC_ERR_GENERATION;
    } catch (const discovery::EstimationError& e) {
        g_last_error = e.what();
        return DSC_ERR_ESTIMATION;
    } catch (const discovery::AnalysisError& e) {
        g_last_error = e.what();
        return DSC_ERR_ANALYSIS;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DSC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DSC_ERR_INTERNAL;
    }
}

template <class T>
void require(const T* p, const char* what)
{
    if (p == nullptr)
        throw InvalidArgument(std::string(what) + " must not be null");
}

void copy_out(const std::string& s, char* buf, std::size_t buflen, std::size_t* needed)
{
    if (needed)
        *needed = s.size() + 1;
    if (buf == nullptr && buflen == 0)
        return;
    require(buf, "buffer");
    if (buflen < s.size() + 1)
        throw BufferTooSmall("buffer needs " + std::to_string(s.size() + 1) + " bytes");
    std::memcpy(buf, s.c_str(), s.size() + 1);
}

std::vector<std::string> split(const char* text)
{
    std::vector<std::string> out;
    if (!text)
        return out;
    std::string cur;
    for (const char* c = text;; ++c) {
        if (*c == ',' || *c == '\0') {
            auto b = cur.find_first_not_of(" \t");
            auto e = cur.find_last_not_of(" \t");
            if (b != std::string::npos)
                out.push_back(cur.substr(b, e - b + 1));
            cur.clear();
            if (*c == '\0')
                break;
        } else {
            cur += *c;
        }
    }
    return out;
}

Eigen::MatrixXd square_matrix(const double* p, std::size_t L)
{
    require(p, "matrix");
    if (L == 0)
        throw InvalidArgument("matrix dimension must be positive");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[i * L + j];
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

extern "C" {

const char* dsc_version(void)
{
    static const std::string v = discovery::version();
    return v.c_str();
}

const char* dsc_last_error(void) { return g_last_error.c_str(); }

const char* dsc_status_name(int status)
{
    switch (status) {
    case DSC_OK:
        return "ok";
    case DSC_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case DSC_ERR_CONFIG:
        return "configuration error";
    case DSC_ERR_IO:
        return "i/o error";
    case DSC_ERR_FIT:
        return "fit error";
    case DSC_ERR_GENERATION:
        return "generation error";
    case DSC_ERR_ESTIMATION:
        return "estimation error";
    case DSC_ERR_ANALYSIS:
        return "analysis error";
    case DSC_ERR_BUFFER_TOO_SMALL:
        return "buffer too small";
    case DSC_ERR_INTERNAL:
        return "internal error";
    default:
        return "unknown status";
    }
}

int dsc_space_create(int k, dsc_space** out)
{
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        auto s = std::make_unique<dsc_space>(dsc_space{discovery::enumerate_models(k)});
        *out = s.release();
    });
}

void dsc_space_destroy(dsc_space* space) { delete space; }

size_t dsc_space_size(const dsc_space* space) { return space ? space->space.size() : 0; }

int dsc_space_factors(const dsc_space* space) { return space ? space->space.k() : 0; }

int dsc_space_model_string(const dsc_space* space, size_t index, char* buf, size_t buflen, size_t* needed)
{
    return guarded([&] {
        require(space, "space");
        if (index >= space->space.size())
            throw InvalidArgument("model index out of range");
        copy_out(space->space[index].to_string(), buf, buflen, needed);
    });
}

int dsc_space_model_shape(const dsc_space* space, size_t index, int* parameters, int* highest_order)
{
    return guarded([&] {
        require(space, "space");
        if (index >= space->space.size())
            throw InvalidArgument("model index out of range");
        const auto& m = space->space[index];
        if (parameters)
            *parameters = m.parameter_count();
        if (highest_order)
            *highest_order = m.highest_order();
    });
}

int dsc_space_parse_model(const dsc_space* space, const char* text, size_t* index)
{
    return guarded([&] {
        require(space, "space");
        require(text, "text");
        require(index, "index");
        *index = space->space.index_of(std::string_view(text));
    });
}

int dsc_config_create(dsc_config** out)
{
    return guarded([&] {
        require(out, "out");
        *out = new dsc_config{};
    });
}

void dsc_config_destroy(dsc_config* config) { delete config; }

int dsc_config_load_file(dsc_config* config, const char* path)
{
    return guarded([&] {
        require(config, "config");
        require(path, "path");
        config->config = discovery::parse_config(discovery::csv::read_file(path), config->config);
    });
}

int dsc_config_set(dsc_config* config, const char* key, const char* value)
{
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        discovery::apply_setting(config->config, key, value);
    });
}

int dsc_config_get(const dsc_config* config, const char* key, char* buf, size_t buflen, size_t* needed)
{
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        copy_out(discovery::config_value(config->config, key), buf, buflen, needed);
    });
}

int dsc_config_is_set(const dsc_config* config, const char* key)
{
    return config && key && config->config.explicit_keys.count(key) ? 1 : 0;
}

int dsc_config_validate(const dsc_config* config)
{
    return guarded([&] {
        require(config, "config");
        discovery::validate(config->config);
    });
}

int dsc_run_abm(const dsc_config* config, dsc_progress_fn progress, void* user, dsc_sweep_stats* stats)
{
    return guarded([&] {
        require(config, "config");
        const auto t0 = std::chrono::steady_clock::now();
        discovery::ProgressFn fn;
        if (progress)
            fn = [&](std::size_t done, std::size_t total) { progress(done, total, user); };
        auto summary = discovery::run_factorial(config->config, fn);
        const double elapsed = seconds_since(t0);
        discovery::write_metadata(config->config.output, "abm", config->config, elapsed,
                                  {{"rows", std::to_string(summary.table.rows.size())},
                                   {"computed", std::to_string(summary.computed)},
                                   {"reused", std::to_string(summary.reused)},
                                   {"failed", std::to_string(summary.failed)}});
        if (stats)
            *stats = dsc_sweep_stats{summary.table.rows.size(), summary.computed, summary.reused, summary.failed,
                                     elapsed};
    });
}

int dsc_run_chain(const dsc_config* config, dsc_sweep_stats* stats)
{
    return guarded([&] {
        require(config, "config");
        const auto t0 = std::chrono::steady_clock::now();
        auto report = discovery::analyze_chain(config->config);
        auto paths = discovery::write_chain_report(report, config->config.output);
        const double elapsed = seconds_since(t0);
        discovery::write_metadata(config->config.output, "chain", config->config, elapsed,
                                  {{"mode", "soft"},
                                   {"models_output", paths[1]},
                                   {"transitions_output", paths[2]},
                                   {"win_matrices_computed", std::to_string(report.win_matrices_computed)},
                                   {"win_matrices_cached", std::to_string(report.win_matrices_cached)}});
        if (stats)
            *stats = dsc_sweep_stats{report.cells.rows.size(), report.win_matrices_computed,
                                     report.win_matrices_cached, 0, elapsed};
    });
}

int dsc_summarize(const char* input, const char* output, const char* group_by, const char* metrics, int cell_means,
                  const char* spearman_output)
{
    return guarded([&] {
        require(input, "input");
        require(output, "output");
        discovery::SummaryOptions opt;
        if (group_by)
            opt.group_by = split(group_by);
        if (metrics)
            opt.metrics = split(metrics);
        if (opt.metrics.empty())
            throw discovery::ConfigError("no metrics to summarize");
        opt.cell_means = cell_means != 0;
        discovery::summarize_file(input, output, opt, spearman_output ? spearman_output : "");
    });
}

void dsc_verify_options_init(dsc_verify_options* options)
{
    if (!options)
        return;
    discovery::VerifyOptions d;
    *options = dsc_verify_options{d.seed, d.workers, nullptr, d.sweep_replications, d.sweep_timesteps,
                                  nullptr, 0, nullptr};
}

int dsc_verify(const dsc_verify_options* options, dsc_criterion_fn on_result, void* user, int* failed)
{
    return guarded([&] {
        require(options, "options");
        discovery::VerifyOptions opt;
        opt.seed = options->seed;
        opt.workers = options->workers;
        if (options->cache_dir)
            opt.cache_dir = options->cache_dir;
        opt.sweep_replications = options->sweep_replications;
        opt.sweep_timesteps = options->sweep_timesteps;
        if (opt.sweep_replications < 1 || opt.sweep_timesteps < 12)
            throw discovery::ConfigError("sweep replications must be >= 1 and timesteps >= 12");
        for (std::size_t i = 0; options->only && i < options->only_count; ++i)
            opt.only.insert(options->only[i]);

        const auto t0 = std::chrono::steady_clock::now();
        auto results = discovery::run_acceptance(opt, [&](const discovery::CriterionResult& r) {
            if (!on_result)
                return;
            dsc_criterion c{r.id, r.title.c_str(), r.passed ? 1 : 0, r.gating ? 1 : 0, r.detail.c_str(), r.seconds};
            on_result(&c, user);
        });
        int bad = 0;
        for (const auto& r : results)
            bad += r.gating && !r.passed;
        if (failed)
            *failed = bad;

        if (options->output) {
            discovery::csv::Table t;
            t.header = {"id", "title", "passed", "gating", "seconds", "detail"};
            for (const auto& r : results)
                t.rows.push_back({std::to_string(r.id), r.title, r.passed ? "1" : "0", r.gating ? "1" : "0",
                                  discovery::csv::format_double(r.seconds), r.detail});
            discovery::csv::write_file_atomic(options->output, discovery::csv::format_table(t));
            discovery::write_sidecar(options->output, "verify",
                                     {{"sweep_replications", std::to_string(opt.sweep_replications)},
                                      {"sweep_timesteps", std::to_string(opt.sweep_timesteps)},
                                      {"workers", std::to_string(opt.workers)},
                                      {"cache_dir", opt.cache_dir}},
                                     opt.seed, seconds_since(t0), {{"failed", std::to_string(bad)}});
        }
    });
}

int dsc_spearman(const double* x, const double* y, size_t n, double* rho, int* defined)
{
    return guarded([&] {
        require(x, "x");
        require(y, "y");
        require(rho, "rho");
        auto r = discovery::spearman(std::vector<double>(x, x + n), std::vector<double>(y, y + n));
        *rho = r ? *r : 0.0;
        if (defined)
            *defined = r ? 1 : 0;
    });
}

int dsc_stationary(const double* p, size_t L, double* pi)
{
    return guarded([&] {
        require(pi, "pi");
        Eigen::VectorXd v = discovery::stationary_distribution(square_matrix(p, L));
        for (std::size_t i = 0; i < L; ++i)
            pi[i] = v(static_cast<Eigen::Index>(i));
    });
}

int dsc_mfpt(const double* p, size_t L, size_t target, double* tau)
{
    return guarded([&] {
        require(tau, "tau");
        if (target >= L)
            throw InvalidArgument("target out of range");
        Eigen::VectorXd v = discovery::mean_first_passage(square_matrix(p, L), target);
        for (std::size_t i = 0; i < L; ++i)
            tau[i] = v(static_cast<Eigen::Index>(i));
    });
}

} // extern "C"
