#include "nscond/nscond.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "commands.hpp"
#include "condint.hpp"
#include "config.hpp"
#include "io.hpp"

struct nsc_config {
  nscond::RunConfig cfg;
};

struct nsc_pattern {
  std::vector<nscond::Point> points;
};

namespace {

thread_local std::string g_last_error;

nsc_status fail(nsc_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
nsc_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return NSC_OK;
  } catch (const nscond::ConfigError& e) {
    return fail(NSC_ERR_CONFIG, e.what());
  } catch (const nscond::InvalidArgument& e) {
    return fail(NSC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const nscond::IoError& e) {
    return fail(NSC_ERR_IO, e.what());
  } catch (const nscond::DomainError& e) {
    return fail(NSC_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NSC_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(NSC_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(NSC_ERR_RUNTIME, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* name) {
  if (!p) throw nscond::InvalidArgument(std::string(name) + " must not be NULL");
}

nscond::RunOptions convert(const nsc_run_options* o) {
  nscond::RunOptions r;
  if (!o) return r;
  if (o->has_seed) r.seed = o->seed;
  if (o->out_dir) r.out_dir = std::string(o->out_dir);
  r.workers = o->workers;
  r.oracle = o->oracle != 0;
  if (o->quad_h > 0.0) r.quad_h = o->quad_h;
  r.rho_kappa = o->force_rho_kappa != 0;
  if (o->replicates > 0) r.replicates = o->replicates;
  if (o->sims > 0) r.sims = o->sims;
  r.svg = o->svg != 0;
  if (o->observed) r.observed_path = std::string(o->observed);
  return r;
}

template <class Cmd>
nsc_status run_command(Cmd cmd, const nsc_config* cfg, const nsc_run_options* opts,
                       char** summary) {
  return guarded([&] {
    need(cfg, "cfg");
    const nscond::CommandReport rep = cmd(cfg->cfg, convert(opts));
    if (summary) {
      std::string text;
      for (const auto& line : rep.lines) text += line + "\n";
      *summary = dup_string(text);
    }
  });
}

nscond::PointPattern as_pattern(const nsc_pattern* p, const nscond::ObservationScheme& scheme) {
  return nscond::PointPattern{p->points, scheme.W, nscond::Role::Thinned};
}

}  // namespace

extern "C" {

const char* nsc_version(void) { return NSCOND_VERSION; }

const char* nsc_last_error(void) { return g_last_error.c_str(); }

void nsc_string_free(char* s) { std::free(s); }

nsc_status nsc_config_parse(const char* json_text, nsc_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new nsc_config{nscond::parse_config(json_text)};
  });
}

nsc_status nsc_config_load(const char* path, nsc_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsc_config{nscond::load_config(path)};
  });
}

nsc_status nsc_config_paper_table1(nsc_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new nsc_config{nscond::paper_table1_config()};
  });
}

nsc_status nsc_config_serialize(const nsc_config* cfg, char** out_json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out_json, "out_json");
    *out_json = dup_string(nscond::serialize_config(cfg->cfg));
  });
}

void nsc_config_free(nsc_config* cfg) { delete cfg; }

void nsc_run_options_init(nsc_run_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof *opts);
  opts->svg = 1;
}

nsc_status nsc_cmd_simulate(const nsc_config* cfg, const nsc_run_options* opts, char** summary) {
  return run_command(nscond::cmd_simulate, cfg, opts, summary);
}

nsc_status nsc_cmd_condint(const nsc_config* cfg, const nsc_run_options* opts, char** summary) {
  return run_command(nscond::cmd_condint, cfg, opts, summary);
}

nsc_status nsc_cmd_validate(const nsc_config* cfg, const nsc_run_options* opts, char** summary) {
  return run_command(nscond::cmd_validate, cfg, opts, summary);
}

nsc_status nsc_cmd_reproduce_table1(const nsc_config* cfg, const nsc_run_options* opts,
                                    char** summary) {
  return run_command(nscond::cmd_reproduce_table1, cfg, opts, summary);
}

nsc_status nsc_pattern_create(const double* xy, size_t n, nsc_pattern** out) {
  return guarded([&] {
    need(out, "out");
    if (n > 0) need(xy, "xy");
    auto* p = new nsc_pattern{};
    p->points.reserve(n);
    for (size_t i = 0; i < n; ++i) p->points.push_back({xy[2 * i], xy[2 * i + 1]});
    *out = p;
  });
}

nsc_status nsc_pattern_load_csv(const char* path, nsc_pattern** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new nsc_pattern{nscond::read_points_csv(path)};
  });
}

size_t nsc_pattern_size(const nsc_pattern* p) { return p ? p->points.size() : 0; }

nsc_status nsc_pattern_get(const nsc_pattern* p, size_t i, double* x, double* y) {
  return guarded([&] {
    need(p, "pattern");
    need(x, "x");
    need(y, "y");
    if (i >= p->points.size()) throw nscond::InvalidArgument("point index out of range");
    *x = p->points[i].x;
    *y = p->points[i].y;
  });
}

void nsc_pattern_free(nsc_pattern* p) { delete p; }

nsc_status nsc_simulate_pattern(const nsc_config* cfg, uint64_t seed, nsc_pattern** observed,
                                nsc_pattern** parents) {
  return guarded([&] {
    need(cfg, "cfg");
    need(observed, "observed");
    const auto scheme = cfg->cfg.scheme();
    const auto real = nscond::sample_thinned_cluster(cfg->cfg.model(),
                                                     cfg->cfg.thinning.build(), scheme, seed);
    auto obs = std::make_unique<nsc_pattern>(
        nsc_pattern{real.thinned.restricted_to(scheme.W).points});
    if (parents) *parents = new nsc_pattern{real.parents.points};
    *observed = obs.release();
  });
}

nsc_status nsc_intensity(const nsc_config* cfg, double x, double y, double* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nscond::intensity(cfg->cfg.model(), cfg->cfg.thinning.build(), {x, y});
  });
}

nsc_status nsc_rho_approx(const nsc_config* cfg, const nsc_pattern* observed, double x, double y,
                          double* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(observed, "observed");
    need(out, "out");
    const auto& c = cfg->cfg;
    const auto scheme = c.scheme();
    *out = nscond::rho_approx({x, y}, as_pattern(observed, scheme), c.model(), c.thinning.build(),
                              scheme, nscond::QuadratureSpec(c.r / 50.0));
  });
}

nsc_status nsc_lambda_cond(const nsc_config* cfg, const nsc_pattern* observed, const double* xy,
                           size_t n, double quad_h, double* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(observed, "observed");
    if (n > 0) {
      need(xy, "xy");
      need(out, "out");
    }
    const auto& c = cfg->cfg;
    const auto model = c.model();
    const auto p = c.thinning.build();
    const auto scheme = c.scheme();
    const nscond::QuadratureSpec q(quad_h > 0.0 ? quad_h : c.r / 50.0);
    const auto lattice = nscond::Lattice::cover(c.S.expanded(c.r), q.h);
    const auto rho = nscond::build_rho_field(
        nscond::ExposureMap::build(model, p, scheme.W, lattice, q), as_pattern(observed, scheme),
        model);
    for (size_t i = 0; i < n; ++i) {
      out[i] = nscond::lambda_cond({xy[2 * i], xy[2 * i + 1]}, rho, model, p, scheme, q);
    }
  });
}

}  // extern "C"
