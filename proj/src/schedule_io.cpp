#include "rarsched/schedule_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rarsched {

void write_schedule_csv(const Schedule& schedule, std::ostream& out) {
    out << "job,start,end,gpus\n";
    for (const auto& [job_id, entry] : schedule.entries) {
        for (const PlacementSpan& span : entry.spans) {
            out << job_id << ',' << span.start_slot << ',' << span.end_slot << ',';
            for (std::size_t i = 0; i < span.placement.gpus.size(); ++i) {
                if (i > 0) out << ' ';
                out << span.placement.gpus[i].server << ':' << span.placement.gpus[i].gpu;
            }
            out << '\n';
        }
    }
}

Schedule read_schedule_csv(std::istream& in) {
    Schedule schedule;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("schedule csv: empty input");
    if (line.rfind("job,", 0) != 0) throw std::runtime_error("schedule csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        PlacementSpan span;
        int job_id;
        if (!std::getline(ss, field, ',')) throw std::runtime_error("schedule csv: bad row");
        job_id = std::stoi(field);
        if (!std::getline(ss, field, ',')) throw std::runtime_error("schedule csv: bad row");
        span.start_slot = std::stoi(field);
        if (!std::getline(ss, field, ',')) throw std::runtime_error("schedule csv: bad row");
        span.end_slot = std::stoi(field);
        std::getline(ss, field);
        std::istringstream gpus(field);
        std::string pair;
        span.placement.job_id = job_id;
        while (gpus >> pair) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw std::runtime_error("schedule csv: bad gpu pair");
            span.placement.gpus.push_back(
                {std::stoi(pair.substr(0, colon)), std::stoi(pair.substr(colon + 1))});
        }
        schedule.entries[job_id].spans.push_back(std::move(span));
    }
    return schedule;
}

}  // namespace rarsched
