#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "daglms/errors.hpp"
#include "daglms/experiments.hpp"

namespace daglms {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IngestionError("cannot write " + tmp.string());
        os << content;
        os.flush();
        if (!os) throw IngestionError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IngestionError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void export_metrics(const MetricSeries& s, const std::filesystem::path& path)
{
    std::string out = "t,e_prior,e_posterior,mse_db,d_squared,j_eps,j_d,attenuation_db\n";
    out.reserve(out.size() + s.size() * 160);
    for (std::size_t t = 0; t < s.size(); ++t) {
        out += std::to_string(t);
        for (double v : {s.e_prior[t], s.e_posterior[t], s.mse_db[t], s.d_squared[t], s.j_eps[t], s.j_d[t],
                         s.attenuation_db[t]}) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace daglms
