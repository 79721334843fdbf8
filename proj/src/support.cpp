#include "ordstat/estimate.hpp"
#include "ordstat/errors.hpp"
#include "ordstat/parallel.hpp"
#include "ordstat/rational.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <thread>

namespace ordstat {

Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) throw InvalidArgument("empty rational literal");
    try {
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            boost::multiprecision::cpp_int num(std::string(trim(text.substr(0, slash))));
            boost::multiprecision::cpp_int den(std::string(trim(text.substr(slash + 1))));
            if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
            return Rational(num, den);
        }
        bool negative = false;
        std::string_view body = text;
        if (body.front() == '-' || body.front() == '+') {
            negative = body.front() == '-';
            body.remove_prefix(1);
        }
        std::string digits;
        long long exponent = 0;
        std::size_t e = body.find_first_of("eE");
        std::string_view mantissa = body.substr(0, e);
        if (e != std::string_view::npos) {
            std::string_view ex = body.substr(e + 1);
            if (!ex.empty() && ex.front() == '+') ex.remove_prefix(1);
            auto [p, ec] = std::from_chars(ex.data(), ex.data() + ex.size(), exponent);
            if (ec != std::errc() || p != ex.data() + ex.size())
                throw InvalidArgument("bad exponent in '" + std::string(text) + "'");
        }
        bool seen_dot = false;
        for (char c : mantissa) {
            if (c == '.' && !seen_dot) {
                seen_dot = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                digits.push_back(c);
                if (seen_dot) --exponent;
            } else {
                throw InvalidArgument("bad rational literal '" + std::string(text) + "'");
            }
        }
        if (digits.empty()) throw InvalidArgument("bad rational literal '" + std::string(text) + "'");
        boost::multiprecision::cpp_int num(digits);
        boost::multiprecision::cpp_int scale = boost::multiprecision::pow(
            boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::llabs(exponent)));
        Rational q = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
        return negative ? Rational(-q) : q;
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const InvalidArgument*>(&e)) throw;
        throw InvalidArgument("bad rational literal '" + std::string(text) + "'");
    }
}

std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t tasks, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    if (threads <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= tasks || failed.load()) return;
                try {
                    body(t);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate monte_carlo_mean(const MonteCarlo& mc, const std::function<double(CounterRng&)>& trial) {
    if (mc.trials == 0) throw InvalidArgument("Monte Carlo needs at least one trial");
    const std::uint64_t batches = (mc.trials + kBatchSize - 1) / kBatchSize;
    std::vector<Moments> per_batch(batches);
    parallel_for(batches, mc.threads, [&](std::size_t b) {
        CounterRng rng(mc.seed, b);
        const std::uint64_t begin = b * kBatchSize;
        const std::uint64_t end = std::min(mc.trials, begin + kBatchSize);
        Moments m;
        for (std::uint64_t t = begin; t < end; ++t) m.add(trial(rng));
        per_batch[b] = m;
    });
    Moments total;
    for (const auto& m : per_batch) total.merge(m);
    Estimate e;
    e.value = total.mean;
    e.stderr_ = total.standard_error();
    e.trials = total.count;
    return e;
}

}  // namespace ordstat
