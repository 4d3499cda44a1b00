#pragma once

#include <string>
#include <vector>

#include "report.hpp"

namespace evolv::cli {

struct Series {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false;
};

struct Chart {
    std::string title, xlabel, ylabel;
    bool log_x = false;
    std::vector<Series> series;
};

std::string render_svg(const Chart& c);

// Charts built from report JSON only, so they can be regenerated from it.
Chart sigma_chart(const Json& analysis_report);
Chart decay_chart(const Json& fundsol_report);
Chart slice_chart(const Json& fundsol_report);

}  // namespace evolv::cli
