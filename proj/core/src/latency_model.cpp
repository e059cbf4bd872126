#include "quorumsim/latency_model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quorumsim {

namespace {

double parse_double(std::string_view text, std::string_view what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(text), &used);
        if (used != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("latency model: bad " + std::string(what) +
                                    " '" + std::string(text) + "'");
    }
}

std::int64_t parse_i64(std::string_view text, std::string_view what)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("latency model: bad " + std::string(what) +
                                    " '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

LatencyModel LatencyModel::constant(DurationUs delay_us)
{
    if (delay_us <= 0) {
        throw std::invalid_argument("latency model: constant delay must be > 0");
    }
    LatencyModel m;
    m.kind_ = Kind::Constant;
    m.constant_us_ = delay_us;
    return m;
}

LatencyModel LatencyModel::lognormal(double median_us, double sigma)
{
    if (!(median_us > 0.0) || !(sigma >= 0.0)) {
        throw std::invalid_argument(
            "latency model: lognormal needs median > 0 and sigma >= 0");
    }
    LatencyModel m;
    m.kind_ = Kind::LogNormal;
    m.median_us_ = median_us;
    m.sigma_ = sigma;
    return m;
}

LatencyModel LatencyModel::empirical(std::vector<DurationUs> samples)
{
    if (samples.empty()) {
        throw std::invalid_argument("latency model: empirical needs samples");
    }
    for (const auto s : samples) {
        if (s <= 0) {
            throw std::invalid_argument(
                "latency model: empirical samples must be > 0");
        }
    }
    LatencyModel m;
    m.kind_ = Kind::Empirical;
    m.samples_ = std::move(samples);
    return m;
}

LatencyModel LatencyModel::parse(std::string_view text)
{
    const auto parts = split(text, ':');
    if (parts.empty()) {
        throw std::invalid_argument("latency model: empty spec");
    }
    const auto kind = parts[0];
    if (kind == "const") {
        if (parts.size() != 2) {
            throw std::invalid_argument("latency model: const:<us>");
        }
        return constant(parse_i64(parts[1], "constant"));
    }
    if (kind == "lognormal") {
        if (parts.size() != 3) {
            throw std::invalid_argument(
                "latency model: lognormal:<median_us>:<sigma>");
        }
        return lognormal(parse_double(parts[1], "median"),
                         parse_double(parts[2], "sigma"));
    }
    if (kind == "empirical") {
        if (parts.size() != 2) {
            throw std::invalid_argument(
                "latency model: empirical:<us>,<us>,...");
        }
        std::vector<DurationUs> samples;
        for (const auto piece : split(parts[1], ',')) {
            samples.push_back(parse_i64(piece, "empirical sample"));
        }
        return empirical(std::move(samples));
    }
    throw std::invalid_argument("latency model: unknown kind '" +
                                std::string(kind) + "'");
}

std::string LatencyModel::to_string() const
{
    std::ostringstream out;
    switch (kind_) {
    case Kind::Constant:
        out << "const:" << constant_us_;
        break;
    case Kind::LogNormal:
        out << "lognormal:" << median_us_ << ':' << sigma_;
        break;
    case Kind::Empirical:
        out << "empirical:";
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            if (i != 0) {
                out << ',';
            }
            out << samples_[i];
        }
        break;
    }
    return out.str();
}

DurationUs LatencyModel::sample(RngStream& rng) const
{
    switch (kind_) {
    case Kind::Constant:
        return constant_us_;
    case Kind::LogNormal: {
        const double v = median_us_ * std::exp(sigma_ * rng.next_normal());
        const auto us = static_cast<DurationUs>(std::llround(v));
        return us > 0 ? us : 1;
    }
    case Kind::Empirical:
        return samples_[rng.next_below(samples_.size())];
    }
    return 1;
}

} // namespace quorumsim
