#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "qdgain/output.hpp"
#include "qdgain/sweep.hpp"

using namespace qdgain;

namespace {

const std::string kScan = R"([model]
architecture = ndqd
detuning = 7 ueV
hopping = 16.4 ueV
coupling = 50 MHz
replicas = 1, 2
[leads]
gamma = 2.6 ueV
bias = 250 ueV
temperature = 0.69 ueV
[cavity]
frequency = 7880.5 MHz
decay = 3.15 MHz
[grid]
start = 7878 MHz
stop = 7883 MHz
points = 7
)";

std::string with_line(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

std::string to_csv(const Dataset& d) {
    std::ostringstream os;
    write_csv(os, d);
    return os.str();
}

std::string to_json(const Dataset& d) {
    std::ostringstream os;
    write_json(os, d);
    return os.str();
}

}  // namespace

TEST(RunTransmission, OneCurvePerReplicaCount) {
    const RunConfig c = parse_config(kScan);
    const Dataset d = run_transmission(c);
    ASSERT_EQ(d.rows.size(), 14u);
    const auto omegas = c.grid->values();
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const ResultRow& r = d.rows[i];
        EXPECT_EQ(r.size, i < 7 ? 1 : 2);
        EXPECT_EQ(r.omega, omegas[i % 7].ueV());
        EXPECT_DOUBLE_EQ(r.gain, std::norm(r.t));
        EXPECT_DOUBLE_EQ(r.phase, std::arg(r.t));
        EXPECT_GE(r.spectrum, 0.0);
        EXPECT_GT(r.threshold_margin, 0.0);
        for (Column col : d.columns) EXPECT_TRUE(std::isfinite(r.value(col)));
    }
    // Per-replica self-energy is shared between the curves.
    EXPECT_EQ(d.rows[3].f_imag, d.rows[10].f_imag);
    EXPECT_GT(d.rows[10].gain, d.rows[3].gain);
}

TEST(RunTransmission, ZeroCouplingIsTheBareLorentzian) {
    const RunConfig c = parse_config(with_line(kScan, "coupling = 50 MHz", "coupling = 0 MHz"));
    const Dataset d = run_transmission(c, 2);
    const double wc = c.cavity.omega_c.ueV(), k = c.cavity.kappa.ueV();
    for (const ResultRow& r : d.rows) {
        EXPECT_EQ(r.f_real, 0.0);
        EXPECT_EQ(r.f_imag, 0.0);
        EXPECT_EQ(r.spectrum, 0.0);
        const double x = r.omega - wc;
        EXPECT_LE(std::abs(r.gain - k * k / (x * x + k * k)), 1e-14 * r.gain);
    }
}

TEST(RunTransmission, ThresholdViolationNamesTheOffendingPoint) {
    const RunConfig c = parse_config(
        with_line(with_line(kScan, "coupling = 50 MHz", "coupling = 70 MHz"), "replicas = 1, 2", "replicas = 1, 4"));
    try {
        run_transmission(c);
        FAIL() << "expected ThresholdViolation";
    } catch (const ThresholdViolation& e) {
        EXPECT_EQ(e.replicas(), 4);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("n = 4"), std::string::npos) << msg;
        EXPECT_NE(msg.find("omega = "), std::string::npos) << msg;
    }
}

TEST(RunTransmission, VerbsCheckTheirSections) {
    const RunConfig plain = parse_config(kScan);
    EXPECT_THROW(run_sweep(plain), ConfigError);
    const RunConfig swept = parse_config(kScan + "[sweep]\naxis1 = bias, 0 ueV, 250 ueV, 2\n");
    EXPECT_THROW(run_transmission(swept), ConfigError);
    const std::string no_grid = kScan.substr(0, kScan.find("[grid]"));
    EXPECT_THROW(run_transmission(parse_config(no_grid)), ConfigError);
    const Dataset s = run_spectrum(plain);
    EXPECT_EQ(s.verb, "spectrum");
    EXPECT_EQ(s.columns.front(), Column::omega);
    EXPECT_EQ(s.columns[1], Column::spectrum);
}

TEST(RunSweep, CartesianOrderAtCavityFrequency) {
    const std::string base = kScan.substr(0, kScan.find("[grid]"));
    const RunConfig c = parse_config(base + "[sweep]\naxis1 = bias, 0 ueV, 250 ueV, 3\naxis2 = detuning, -7 ueV, 7 ueV, 2\n");
    const Dataset d = run_sweep(c);
    ASSERT_EQ(d.rows.size(), 12u);
    EXPECT_EQ(d.columns.back(), Column::photon_number);
    const double biases[] = {0.0, 125.0, 250.0};
    const double eps[] = {-7.0, 7.0};
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        const ResultRow& r = d.rows[i];
        EXPECT_EQ(r.size, i < 6 ? 1 : 2);
        ASSERT_EQ(r.axes.size(), 2u);
        EXPECT_EQ(r.axes[0], biases[(i % 6) / 2]);
        EXPECT_EQ(r.axes[1], eps[i % 2]);
        EXPECT_EQ(r.omega, c.cavity.omega_c.ueV());
        EXPECT_GE(r.photon_number, 0.0);
    }
    // Unbiased: dissipative. Biased with positive detuning: amplifying.
    EXPECT_LT(d.rows[0].f_imag, 0.0);
    EXPECT_LT(d.rows[1].f_imag, 0.0);
    EXPECT_GT(d.rows[5].f_imag, 0.0);
    EXPECT_LT(d.rows[4].f_imag, 0.0);
}

TEST(RunSweep, CascadeSizesAreSeparateMedia) {
    const std::string base = with_line(with_line(kScan.substr(0, kScan.find("[grid]")), "ndqd", "cascade"),
                                       "replicas = 1, 2", "sites = 1, 3");
    const RunConfig c = parse_config(base + "[sweep]\naxis1 = detuning, -26 ueV, -20 ueV, 3\n");
    const Dataset d = run_sweep(c);
    ASSERT_EQ(d.rows.size(), 6u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_LE(d.rows[i].gain, 1.0);  // a single dot never amplifies
        EXPECT_NE(d.rows[i].f_imag, d.rows[i + 3].f_imag);
    }
    EXPECT_GT(d.rows[4].gain, 1.0);  // three dots near their double resonance
    EXPECT_NE(to_csv(d).find("\ndetuning_ueV,m,omega_ueV,"), std::string::npos);
}

TEST(Output, CsvCarriesMetadataAndRoundTrips) {
    const RunConfig c = parse_config(kScan);
    const Dataset d = run_transmission(c);
    const std::string csv = to_csv(d);
    EXPECT_EQ(csv.rfind("# qdgain ", 0), 0u);
    for (const char* key : {"# verb: transmission", "# config_hash: fnv1a64:", "# units: ", "# quadrature: abs_tol=1e-10",
                            "# config:\n", "# end config\n"})
        EXPECT_NE(csv.find(key), std::string::npos) << key;
    EXPECT_NE(csv.find("\nn,omega_ueV,re_t,im_t,gain,phase_rad,spectrum_per_ueV,f_real_ueV,f_imag_ueV,"
                       "emission_rate_ueV,absorption_rate_ueV,threshold_margin_ueV\n"),
              std::string::npos);
    EXPECT_EQ(embedded_config(csv), c);

    // Values are printed with 17 significant digits and read back exactly.
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line) && line.rfind("n,", 0) != 0) {
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::vector<double> fields;
        std::stringstream ls(line);
        for (std::string f; std::getline(ls, f, ',');) fields.push_back(std::stod(f));
        ASSERT_EQ(fields.size(), 1 + d.columns.size());
        for (std::size_t k = 0; k < d.columns.size(); ++k) EXPECT_EQ(fields[k + 1], d.rows[row].value(d.columns[k]));
        ++row;
    }
    EXPECT_EQ(row, d.rows.size());
}

TEST(Output, JsonDocumentMatchesCsv) {
    const RunConfig c = parse_config(kScan + "[sweep]\naxis1 = bias, 100 ueV, 250 ueV, 2\n");
    const Dataset d = run_sweep(c);
    const std::string text = to_json(d);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_EQ(doc["metadata"]["verb"], "sweep");
    EXPECT_EQ(doc["metadata"]["axes"][0]["parameter"], "bias");
    EXPECT_EQ(doc["metadata"]["quadrature"]["cutoff"], "auto");
    EXPECT_EQ(doc["columns"][0], "bias_ueV");
    EXPECT_EQ(doc["columns"][1], "n");
    ASSERT_EQ(doc["rows"].size(), d.rows.size());
    EXPECT_EQ(doc["rows"][3][2].get<double>(), d.rows[3].omega);
    EXPECT_EQ(doc["rows"][5][7].get<double>(), d.rows[5].spectrum);
    EXPECT_EQ(embedded_config(text), c);
    EXPECT_EQ(parse_format("json"), Format::json);
    EXPECT_THROW(parse_format("xml"), std::invalid_argument);
    EXPECT_THROW(embedded_config("a,b\n1,2\n"), ConfigError);
}

TEST(Output, IndependentOfThreadCount) {
    const RunConfig c = parse_config(kScan + "[sweep]\naxis1 = detuning, 5 ueV, 8 ueV, 3\n");
    const std::string one = to_csv(run_sweep(c, 1));
    EXPECT_EQ(to_csv(run_sweep(c, 4)), one);
    EXPECT_EQ(to_csv(run_sweep(c, 7)), one);
    EXPECT_EQ(to_json(run_sweep(c, 3)), to_json(run_sweep(c, 1)));
}
