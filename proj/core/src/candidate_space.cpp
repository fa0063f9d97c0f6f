// Copyright 2026 The epasslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "epass/candidate_space.hpp"

#include <algorithm>
#include <cmath>

#include "epass/common.hpp"

namespace epass::mrz {

namespace {

constexpr char kBase36[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr std::uint64_t kAlnumSpace = 101559956668416ULL;  // 36^9
constexpr double kDaysPerYear = 365.25;

const Date kBirthWindowFirst = Date::from_ymd(1930, 1, 1);
const Date kBirthWindowEnd = Date::from_ymd(2030, 1, 1);

std::vector<Date> birth_support(const AttackerAssumptions& a) {
  if (a.known_birth_date) return {*a.known_birth_date};
  DateRange range{kBirthWindowFirst, kBirthWindowEnd - kBirthWindowFirst};
  if (a.age_known_within_years) {
    if (!a.birth_window_start)
      throw InvalidInput(
          "birth_window_start: required to enumerate an age window");
    range = {*a.birth_window_start,
             static_cast<int>(std::lround(*a.age_known_within_years *
                                          kDaysPerYear))};
  }
  if (range.days <= 0) throw InvalidInput("birth_date: empty support");
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(range.days));
  for (int i = 0; i < range.days; ++i) out.push_back(range.first.plus_days(i));
  return out;
}

DateRange expiry_range(const IssuancePolicy& p, const AttackerAssumptions& a) {
  if (a.expiry_window) return *a.expiry_window;
  return {a.as_of,
          static_cast<int>(std::lround(p.validity_years * kDaysPerYear))};
}

std::vector<Date> expiries_between(const IssuancePolicy& p, Date first,
                                   Date last) {
  std::vector<Date> out;
  for (Date d = first; d <= last; d = d.plus_days(1))
    if (!p.working_days_only || d.is_weekday()) out.push_back(d);
  return out;
}

std::shared_ptr<CandidateSpace::Layout> build_layout(
    const IssuancePolicy& policy, const AttackerAssumptions& a) {
  validate(policy);
  auto layout = std::make_shared<CandidateSpace::Layout>();
  layout->scheme = policy.number_scheme;
  layout->numbering = policy.sequential;
  layout->births = birth_support(a);

  DateRange window = expiry_range(policy, a);
  if (window.days <= 0) throw InvalidInput("expiry_date: empty support");

  std::uint64_t first = 0;
  std::uint64_t count = kAlnumSpace;
  if (policy.number_scheme == NumberScheme::kSequentialNumeric) {
    first = policy.sequential.first_number;
    count = policy.sequential.max_population;
  }
  if (a.number_window) std::tie(first, count) = *a.number_window;
  if (count == 0) throw InvalidInput("document_number: empty support");

  // Known pairs split numbers and expiry dates into k + 1 aligned intervals.
  std::vector<std::pair<std::uint64_t, Date>> cuts;
  if (policy.number_scheme == NumberScheme::kSequentialNumeric) {
    for (const auto& kp : policy.known_pairs) {
      auto n = *policy.sequential.parse(kp.document_number);
      if (n < first || n >= first + count || !window.contains(kp.expiry_date))
        throw InvalidInput("known_pairs: '" + kp.document_number +
                           "' lies outside the searched window");
      cuts.emplace_back(n, kp.expiry_date);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 1; i < cuts.size(); ++i)
      if (cuts[i].second < cuts[i - 1].second)
        throw InvalidInput(
            "known_pairs: expiry dates must grow with sequential numbers");
  }

  std::uint64_t lo = first;
  Date from = window.first;
  for (std::size_t j = 0; j <= cuts.size(); ++j) {
    bool last_block = j == cuts.size();
    std::uint64_t hi = last_block ? first + count : cuts[j].first;
    Date to = last_block ? window.last() : cuts[j].second;
    CandidateSpace::Block block;
    block.expiries = expiries_between(policy, from, to);
    block.number_first = lo;
    block.number_count = hi - lo;
    if (!block.expiries.empty() && block.number_count > 0)
      layout->blocks.push_back(std::move(block));
    if (!last_block) {
      lo = cuts[j].first + 1;
      from = cuts[j].second;
    }
  }
  return layout;
}

long double layout_count(const CandidateSpace::Layout& layout) {
  long double total = 0;
  for (const auto& b : layout.blocks)
    total += static_cast<long double>(b.expiries.size()) *
             static_cast<long double>(b.number_count) *
             static_cast<long double>(layout.births.size());
  return total;
}

}  // namespace

CandidateSpace::CandidateSpace(std::shared_ptr<const Layout> layout)
    : CandidateSpace(layout, 0, layout->block_starts.back()) {}

CandidateSpace::CandidateSpace(std::shared_ptr<const Layout> layout,
                               std::uint64_t begin, std::uint64_t end)
    : layout_(std::move(layout)), begin_(begin), end_(end) {}

std::string CandidateSpace::render_number(std::uint64_t n) const {
  if (layout_->scheme == NumberScheme::kSequentialNumeric)
    return pad_document_number(layout_->numbering.render(n));
  std::string out(kDocumentNumberLength, '0');
  for (std::size_t i = kDocumentNumberLength; i-- > 0;) {
    out[i] = kBase36[n % 36];
    n /= 36;
  }
  return out;
}

MrzInfo CandidateSpace::at(std::uint64_t i) const {
  if (i >= count()) throw InvalidInput("candidate index out of range");
  std::uint64_t global = begin_ + i;
  const auto& starts = layout_->block_starts;
  auto it = std::upper_bound(starts.begin(), starts.end(), global);
  std::size_t block_index = static_cast<std::size_t>(it - starts.begin()) - 1;
  const Block& block = layout_->blocks[block_index];
  std::uint64_t local = global - starts[block_index];

  const std::uint64_t births = layout_->births.size();
  const std::uint64_t per_expiry = block.number_count * births;
  std::uint64_t expiry = local / per_expiry;
  std::uint64_t rest = local % per_expiry;
  std::uint64_t number = rest / births;
  std::uint64_t birth = rest % births;
  return MrzInfo::from_fields(render_number(block.number_first + number),
                              layout_->births[birth],
                              block.expiries[expiry]);
}

std::vector<CandidateSpace> CandidateSpace::partition(std::size_t parts) const {
  if (parts == 0) throw InvalidInput("partition: parts must be positive");
  std::vector<CandidateSpace> out;
  out.reserve(parts);
  const std::uint64_t n = count();
  for (std::size_t p = 0; p < parts; ++p) {
    std::uint64_t lo = begin_ + n * p / parts;
    std::uint64_t hi = begin_ + n * (p + 1) / parts;
    out.push_back(CandidateSpace(layout_, lo, hi));
  }
  return out;
}

long double candidate_count(const IssuancePolicy& policy,
                            const AttackerAssumptions& assumptions) {
  return layout_count(*build_layout(policy, assumptions));
}

CandidateSpace candidate_space(const IssuancePolicy& policy,
                               const AttackerAssumptions& assumptions,
                               double cap_bits) {
  auto layout = build_layout(policy, assumptions);
  long double total = layout_count(*layout);
  double bits = total > 0 ? static_cast<double>(std::log2(total)) : 0.0;
  if (bits > cap_bits || bits >= 63) throw SpaceTooLarge(bits, cap_bits);

  layout->block_starts.assign(1, 0);
  for (const auto& b : layout->blocks)
    layout->block_starts.push_back(layout->block_starts.back() +
                                   b.expiries.size() * b.number_count *
                                       layout->births.size());
  return CandidateSpace(std::move(layout));
}

}  // namespace epass::mrz
