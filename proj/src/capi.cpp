#include "itwlab/itwlab.h"

#include <cstring>
#include <stdexcept>
#include <string>

#include "brownian.hpp"
#include "experiments.hpp"
#include "fbm.hpp"
#include "fields.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <class F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return set_error(ITWLAB_ERR_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return set_error(ITWLAB_ERR_DOMAIN, e.what());
  } catch (const std::exception& e) {
    return set_error(ITWLAB_ERR_RUNTIME, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct itwlab_lattice {
  itwlab::BrownianLattice impl;
};

struct itwlab_fbm {
  itwlab::FbmPath impl;
};

struct itwlab_field {
  std::shared_ptr<const itwlab::fields::AdaptedField> impl;
};

extern "C" {

const char* itwlab_version(void) { return itwlab::experiments::kVersion; }

const char* itwlab_last_error(void) { return g_last_error.c_str(); }

void itwlab_string_free(char* s) { delete[] s; }

int itwlab_lattice_create(int dims, double step, double left, double right, uint64_t seed,
                          uint64_t path_index, itwlab_lattice** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("out must not be null");
    itwlab::LatticeConfig cfg{dims, step, left, right};
    *out = new itwlab_lattice{itwlab::BrownianLattice::sample(cfg, seed, path_index)};
    return ITWLAB_OK;
  });
}

void itwlab_lattice_destroy(itwlab_lattice* lat) { delete lat; }

int64_t itwlab_lattice_cells(const itwlab_lattice* lat) { return lat ? lat->impl.cells() : 0; }

int itwlab_lattice_increment(const itwlab_lattice* lat, int component, int64_t cell,
                             double* out) {
  return guarded([&] {
    if (!lat || !out) throw std::invalid_argument("null argument");
    if (component < 0 || component >= lat->impl.dims() || cell < 0 ||
        cell >= lat->impl.cells())
      throw std::invalid_argument("component or cell out of range");
    *out = lat->impl.increment(component, cell);
    return ITWLAB_OK;
  });
}

int itwlab_lattice_value(const itwlab_lattice* lat, int component, int64_t grid_index,
                         double* out) {
  return guarded([&] {
    if (!lat || !out) throw std::invalid_argument("null argument");
    if (component < 0 || component >= lat->impl.dims() || grid_index < 0 ||
        grid_index > lat->impl.positive_cells())
      throw std::invalid_argument("component or index out of range");
    *out = lat->impl.value(component, grid_index);
    return ITWLAB_OK;
  });
}

int itwlab_fbm_create(const itwlab_lattice* lat, double hurst, itwlab_fbm** out) {
  return guarded([&] {
    if (!lat || !out) throw std::invalid_argument("null argument");
    *out = new itwlab_fbm{itwlab::FbmPath::build(lat->impl, hurst)};
    return ITWLAB_OK;
  });
}

void itwlab_fbm_destroy(itwlab_fbm* path) { delete path; }

int64_t itwlab_fbm_points(const itwlab_fbm* path) { return path ? path->impl.points() : 0; }

int itwlab_fbm_value(const itwlab_fbm* path, int component, int64_t index, double* out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    if (component < 0 || component >= path->impl.dims() || index < 0 ||
        index >= path->impl.points())
      throw std::invalid_argument("component or index out of range");
    *out = path->impl.value(component, index);
    return ITWLAB_OK;
  });
}

int itwlab_fbm_w1(const itwlab_fbm* path, int component, int64_t from, int64_t to, double* out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    if (component < 0 || component >= path->impl.dims() || from < 0 || to < from ||
        to >= path->impl.points())
      throw std::invalid_argument("index range invalid (need 0 <= from <= to)");
    *out = path->impl.w1(component, from, to);
    return ITWLAB_OK;
  });
}

int itwlab_fbm_w2(const itwlab_fbm* path, int component, int64_t from, int64_t to, double* out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    if (component < 0 || component >= path->impl.dims() || from < 0 || to < from ||
        to >= path->impl.points())
      throw std::invalid_argument("index range invalid (need 0 <= from <= to)");
    *out = path->impl.w2(component, from, to);
    return ITWLAB_OK;
  });
}

int itwlab_field_create(const char* id, itwlab_field** out) {
  return guarded([&] {
    if (!id || !out) throw std::invalid_argument("null argument");
    *out = new itwlab_field{itwlab::fields::make_field(id)};
    return ITWLAB_OK;
  });
}

void itwlab_field_destroy(itwlab_field* field) { delete field; }

int itwlab_field_dim(const itwlab_field* field) { return field ? field->impl->dim() : 0; }

int itwlab_field_eval(const itwlab_field* field, double t, const double* x, int xd,
                      double* out) {
  return guarded([&] {
    if (!field || !x || !out) throw std::invalid_argument("null argument");
    if (!field->impl->deterministic())
      throw std::domain_error("pointwise eval requires a deterministic field");
    if (xd != field->impl->dim()) throw std::invalid_argument("x dimension mismatch");
    *out = field->impl->eval(t, {}, std::span<const double>(x, xd));
    return ITWLAB_OK;
  });
}

int itwlab_run_experiment(const char* config_json, char** result_json_out) {
  return guarded([&] {
    if (!config_json || !result_json_out) throw std::invalid_argument("null argument");
    const auto config = nlohmann::json::parse(config_json);
    const auto outcome = itwlab::experiments::run_experiment(config);
    nlohmann::json result = outcome.result;
    result.erase("artifact_writer");
    result["config"] = outcome.config;
    *result_json_out = dup_string(result.dump(2));
    if (!outcome.criteria_pass)
      return set_error(ITWLAB_ERR_CRITERIA, "configured pass-criteria failed");
    return ITWLAB_OK;
  });
}

int itwlab_run_config_file(const char* path, const char* outdir_or_null) {
  if (!path) {
    set_error(ITWLAB_ERR_INVALID, "null config path");
    return 2;
  }
  try {
    return itwlab::experiments::run_config_file(path, outdir_or_null ? outdir_or_null : "");
  } catch (const std::exception& e) {
    set_error(ITWLAB_ERR_RUNTIME, e.what());
    return 2;
  }
}

int itwlab_catalog_json(char** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null argument");
    *out = dup_string(itwlab::experiments::catalog_json().dump(2));
    return ITWLAB_OK;
  });
}

int itwlab_verify_quick(int workers, char** report_json_out) {
  return guarded([&] {
    const auto report = itwlab::experiments::quick_verify(workers);
    if (report_json_out) *report_json_out = dup_string(report.dump(2));
    if (!report["pass"].get<bool>())
      return set_error(ITWLAB_ERR_CRITERIA, "quick verification failed");
    return ITWLAB_OK;
  });
}

}  // extern "C"
