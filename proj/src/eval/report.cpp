#include "splatsim/eval/report.hpp"

#include <map>

#include <fmt/format.h>

#include "splatsim/eval/metrics.hpp"

namespace splatsim {

namespace {

std::string psnr_cell(double v) { return v >= kPsnrCap ? fmt::format("{:.2f} (cap)", v) : fmt::format("{:.2f}", v); }

}  // namespace

std::string format_metric_table(const MetricReport& report, bool per_frame) {
  std::map<std::string, std::vector<FrameMetric>> by_camera;
  for (const auto& f : report.frames) by_camera[f.camera].push_back(f);

  std::string out = fmt::format("# {}\n", report.label);
  out += fmt::format("{:<12} {:>7} {:>23} {:>19}\n", "camera", "frames", "PSNR dB (mean +- std)", "SSIM (mean +- std)");
  auto row = [&](const std::string& name, const MetricReport& r) {
    out += fmt::format("{:<12} {:>7} {:>14} +- {:<5.2f} {:>9.4f} +- {:.4f}\n", name, r.count, psnr_cell(r.mean_psnr),
                       r.std_psnr, r.mean_ssim, r.std_ssim);
  };
  for (const auto& [cam, frames] : by_camera) row(cam, summarize("", frames));
  row("all", report);
  if (per_frame) {
    out += fmt::format("\n{:<12} {:>6} {:>12} {:>9}\n", "camera", "step", "PSNR dB", "SSIM");
    for (const auto& f : report.frames) {
      out += fmt::format("{:<12} {:>6} {:>12} {:>9.4f}\n", f.camera, f.step, psnr_cell(f.psnr), f.ssim);
    }
  }
  return out;
}

std::string format_timing_table(const TimingReport& r) {
  std::string out = fmt::format("# per-step timing, {} steps ({} rollouts, {} rejected), {} camera(s) at {}x{}, {} splats\n",
                                r.steps, r.rollouts, r.failed_rollouts, r.cameras, r.width, r.height, r.splats);
  out += fmt::format("{:<24} {:>10} {:>10} {:>10} {:>10} {:>10}\n", "ms/step", "physics", "render", "planning",
                     "other", "total");
  out += fmt::format("{:<24} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f}\n", "measured (CPU)", r.physics_ms,
                     r.render_ms, r.planning_ms, r.other_ms, r.total_ms);
  out += fmt::format("{:<24} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f}\n", "reference (published)",
                     TimingReference::physics_ms, TimingReference::render_ms, TimingReference::planning_ms,
                     TimingReference::other_ms, TimingReference::total_ms);
  out += fmt::format("components sum to {:.2f} ms, {:.2f}% from the measured total ({})\n", r.component_sum(),
                     100.0 * r.accounting_error(), r.accounting_error() <= 0.05 ? "within 5%" : "OUTSIDE 5%");
  return out;
}

Json metric_report_to_json(const MetricReport& report) {
  Json frames = Json::array();
  for (const auto& f : report.frames) frames.push_back({{"camera", f.camera}, {"step", f.step}, {"psnr", f.psnr}, {"ssim", f.ssim}});
  return {{"label", report.label},
          {"count", report.count},
          {"psnr", {{"mean", report.mean_psnr}, {"std", report.std_psnr}, {"cap", kPsnrCap}}},
          {"ssim", {{"mean", report.mean_ssim}, {"std", report.std_ssim}}},
          {"frames", frames}};
}

Json timing_report_to_json(const TimingReport& r) {
  return {{"steps", r.steps},
          {"rollouts", r.rollouts},
          {"failed_rollouts", r.failed_rollouts},
          {"cameras", r.cameras},
          {"width", r.width},
          {"height", r.height},
          {"splats", r.splats},
          {"encoded_bytes", r.encoded_bytes},
          {"ms_per_step",
           {{"physics", r.physics_ms},
            {"render", r.render_ms},
            {"planning", r.planning_ms},
            {"other", r.other_ms},
            {"total", r.total_ms}}},
          {"reference_ms_per_step",
           {{"physics", TimingReference::physics_ms},
            {"render", TimingReference::render_ms},
            {"planning", TimingReference::planning_ms},
            {"other", TimingReference::other_ms},
            {"total", TimingReference::total_ms}}},
          {"component_sum_ms", r.component_sum()},
          {"accounting_error", r.accounting_error()}};
}

}  // namespace splatsim
