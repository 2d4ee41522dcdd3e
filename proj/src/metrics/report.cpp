#include "stmforge/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "stmforge/common/binary_io.hpp"
#include "stmforge/imagecore/transforms.hpp"

namespace stmforge::metrics {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

Report evaluate_pairs(const std::vector<ImagePair>& pairs, SsimMode mode) {
    if (pairs.empty()) throw std::invalid_argument("no image pairs to evaluate");
    Report rep;
    rep.ssim_mode = mode;
    std::vector<double> ps, ss;
    for (const auto& p : pairs) {
        const Image a = imagecore::clamp_to(imagecore::to_unit_range(p.ground_truth), imagecore::NormState::unit);
        const Image b = imagecore::clamp_to(imagecore::to_unit_range(p.prediction), imagecore::NormState::unit);
        PairRow row{p.id, psnr(a, b), ssim(a, b, mode)};
        ps.push_back(row.psnr);
        ss.push_back(row.ssim);
        rep.rows.push_back(std::move(row));
    }
    const auto n = static_cast<double>(pairs.size());
    for (double v : ps) rep.mean_psnr += v / n;
    for (double v : ss) rep.mean_ssim += v / n;
    rep.median_psnr = median(ps);
    rep.median_ssim = median(ss);
    return rep;
}

std::string report_csv(const Report& report) {
    std::string out = "id,psnr,ssim\n";
    for (const auto& r : report.rows) out += r.id + "," + fmt(r.psnr) + "," + fmt(r.ssim) + "\n";
    out += "mean," + fmt(report.mean_psnr) + "," + fmt(report.mean_ssim) + "\n";
    out += "median," + fmt(report.median_psnr) + "," + fmt(report.median_ssim) + "\n";
    if (report.kid) out += "kid," + fmt(*report.kid) + ",\n";
    if (report.cmmd) out += "cmmd," + fmt(*report.cmmd) + ",\n";
    return out;
}

void write_report_csv(const std::filesystem::path& path, const Report& report) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << report_csv(report);
    if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace stmforge::metrics
