#include "qftion/qftion.h"

#include "qftion/error.hpp"
#include "qftion/scenario.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

struct qft_scenario {
    qftion::Scenario value;
    std::string warnings;
};

struct qft_series {
    qftion::TimeSeries value;
    int n_max = 0;
    std::string csv;
};

struct qft_report {
    std::string text;
};

namespace {

thread_local std::string last_error;

qft_status fail(int code, std::string message)
{
    last_error = std::move(message);
    return static_cast<qft_status>(code);
}

template <class F>
qft_status guarded(F&& f)
{
    try {
        last_error.clear();
        return f();
    } catch (...) {
        std::string message;
        const int code = qftion::status_for_current_exception(message);
        return fail(code, std::move(message));
    }
}

qft_status wrap_scenario(qftion::Scenario s, qft_scenario** out)
{
    auto h = std::make_unique<qft_scenario>();
    for (const auto& w : s.warnings) h->warnings += w + "\n";
    h->value = std::move(s);
    *out = h.release();
    return QFT_OK;
}

std::vector<std::string> split_values(const char* text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

extern "C" {

const char* qft_version(void) { return "1.0.0"; }

const char* qft_last_error(void) { return last_error.c_str(); }

qft_status qft_scenario_load(const char* path, qft_scenario** out)
{
    if (!path || !out) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] { return wrap_scenario(qftion::load_scenario(path), out); });
}

qft_status qft_scenario_parse(const char* text, qft_scenario** out)
{
    if (!text || !out) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        std::istringstream in(text);
        return wrap_scenario(qftion::parse_scenario(in), out);
    });
}

void qft_scenario_free(qft_scenario* s) { delete s; }

qft_status qft_scenario_set(qft_scenario* s, const char* key, double value)
{
    if (!s || !key) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        qftion::Scenario copy = s->value;
        qftion::set_coupling(copy, key, value);
        copy.validate();
        s->value = std::move(copy);
        return QFT_OK;
    });
}

const char* qft_scenario_warnings(const qft_scenario* s) { return s ? s->warnings.c_str() : ""; }

qft_status qft_scenario_simulate(const qft_scenario* s, qft_series** out)
{
    if (!s || !out) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        qftion::RunResult r = qftion::run_scenario(s->value);
        auto h = std::make_unique<qft_series>();
        h->value = std::move(r.series);
        h->n_max = r.n_max;
        *out = h.release();
        return QFT_OK;
    });
}

qft_status qft_scenario_run(const qft_scenario* s, const char* out_dir, char* path_buf,
                            size_t path_len)
{
    if (!s) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const qftion::RunResult r = qftion::run_scenario(s->value);
        const auto path = qftion::output_path(s->value, out_dir ? out_dir : "");
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream file(path, std::ios::binary);
        if (!file) return fail(QFT_ERR_IO, "cannot write " + path.string());
        qftion::write_csv(file, r.series);
        file.close();
        if (!file) return fail(QFT_ERR_IO, "write failed for " + path.string());
        if (path_buf && path_len > 0) {
            const std::string p = path.string();
            const std::size_t n = std::min(p.size(), path_len - 1);
            std::memcpy(path_buf, p.data(), n);
            path_buf[n] = '\0';
        }
        return QFT_OK;
    });
}

qft_status qft_scenario_sweep(const qft_scenario* s, const char* key, const char* values,
                              const char* out_dir, unsigned threads, qft_report** report)
{
    if (!s || !key || !values) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const auto result = qftion::sweep_scenario(s->value, key, split_values(values),
                                                   out_dir ? out_dir : "", threads);
        std::ostringstream text;
        int first = 0;
        std::string first_message;
        for (const auto& e : result.entries) {
            text << e.value_text << ": ";
            if (e.status == 0) {
                text << "ok " << e.csv.string() << " peak_mean_n "
                     << qftion::format_number(e.peak_mean_n) << '\n';
            } else {
                text << "failed (" << e.status << ") " << e.message << '\n';
                if (first == 0) {
                    first = e.status;
                    first_message = e.message;
                }
            }
        }
        text << "summary " << result.summary.string() << '\n';
        if (report) *report = new qft_report{text.str()};
        if (first != 0) return fail(first, first_message);
        return QFT_OK;
    });
}

qft_status qft_scenario_verify(const qft_scenario* s, qft_report** report)
{
    if (!s) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const qftion::VerifyReport r = qftion::verify_scenario(s->value);
        if (report) *report = new qft_report{r.text()};
        if (r.pass()) return QFT_OK;
        std::string failing;
        for (const auto& c : r.checks)
            if (!c.pass && !c.skipped) failing += (failing.empty() ? "" : ", ") + c.name;
        return fail(QFT_ERR_VERIFY, "failing checks: " + failing);
    });
}

const char* qft_report_text(const qft_report* r) { return r ? r->text.c_str() : ""; }

void qft_report_free(qft_report* r) { delete r; }

size_t qft_series_length(const qft_series* ts) { return ts ? ts->value.size() : 0; }

int qft_series_n_max(const qft_series* ts) { return ts ? ts->n_max : 0; }

qft_status qft_series_column(const qft_series* ts, qft_column column, double* out, size_t len)
{
    if (!ts || !out) return fail(QFT_ERR_INTERNAL, "null argument");
    const auto& v = ts->value;
    const std::vector<double>* src = nullptr;
    switch (column) {
    case QFT_COL_TIME: src = &v.times; break;
    case QFT_COL_SURVIVAL: src = &v.survival; break;
    case QFT_COL_MEAN_N: src = &v.mean_boson; break;
    case QFT_COL_POP_VAC: src = &v.populations[0]; break;
    case QFT_COL_POP_F: src = &v.populations[1]; break;
    case QFT_COL_POP_FBAR: src = &v.populations[2]; break;
    case QFT_COL_POP_PAIR: src = &v.populations[3]; break;
    case QFT_COL_NORM_ERROR: src = &v.norm_error; break;
    default: return fail(QFT_ERR_VALIDATION, "unknown column");
    }
    if (len < src->size()) return fail(QFT_ERR_VALIDATION, "output buffer too small");
    std::copy(src->begin(), src->end(), out);
    return QFT_OK;
}

const char* qft_series_csv(qft_series* ts)
{
    if (!ts) return "";
    if (ts->csv.empty()) {
        std::ostringstream out;
        qftion::write_csv(out, ts->value);
        ts->csv = out.str();
    }
    return ts->csv.c_str();
}

void qft_series_free(qft_series* ts) { delete ts; }

qft_status qft_gaussian_overlap(double a, double s1, double b, double s2, double q, double* re,
                                double* im)
{
    if (!re || !im) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const auto z = qftion::gaussian_overlap(a, s1, b, s2, q);
        *re = z.real();
        *im = z.imag();
        return QFT_OK;
    });
}

qft_status qft_manymode_dimension(int n_ions, int phonons_per_ion, uint64_t* out)
{
    if (!out) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const auto d = qftion::manymode_dimension(n_ions, phonons_per_ion);
        if (!d) return fail(QFT_ERR_VALIDATION, "dimension exceeds 2^63");
        *out = *d;
        return QFT_OK;
    });
}

qft_status qft_driven_oscillator_oracle(double g1, double omega0, double t, double* mean_boson,
                                        double* survival)
{
    if (!mean_boson || !survival) return fail(QFT_ERR_INTERNAL, "null argument");
    return guarded([&] {
        const auto v = qftion::driven_oscillator_oracle(g1, omega0, t);
        *mean_boson = v.mean_boson;
        *survival = v.survival;
        return QFT_OK;
    });
}

} // extern "C"
