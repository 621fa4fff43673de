#include "csm/access_ledger.hpp"

#include "csm/errors.hpp"

namespace csm {

AccessLedger::AccessLedger(const EventLog &log)
{
  for (const auto &e : log)
    add(e);
}

void AccessLedger::add(const ChangeEvent &e)
{
  auto &records = byActivity_[e.activity];
  auto it = records.find(e.artifact);
  if (e.action == Action::CheckOut) {
    if (it != records.end())
      throw ProtocolError(ProtocolError::Code::RepeatedCheckout,
                          to_string(e.activity) + " already checked out '" + e.artifact + "'");
    records.emplace(e.artifact, AccessRecord{e.activity, e.artifact, e.mode, e.id, e.time, e.version, {}, {}, {}});
    return;
  }
  if (it == records.end() || it->second.mode != AccessMode::Write || it->second.checked_in())
    throw ProtocolError(ProtocolError::Code::NoOpenCheckout,
                        to_string(e.activity) + " has no open write checkout of '" + e.artifact + "'");
  it->second.checkinEvent = e.id;
  it->second.checkinTime = e.time;
  it->second.checkinVersion = e.version;
}

const AccessRecord *AccessLedger::find(const ActivityRef &activity, const std::string &artifact) const
{
  auto a = byActivity_.find(activity);
  if (a == byActivity_.end())
    return nullptr;
  auto r = a->second.find(artifact);
  return r == a->second.end() ? nullptr : &r->second;
}

std::vector<const AccessRecord *> AccessLedger::records() const
{
  std::vector<const AccessRecord *> out;
  for (const auto &[_, recs] : byActivity_)
    for (const auto &[__, r] : recs)
      out.push_back(&r);
  return out;
}

std::vector<const AccessRecord *> AccessLedger::records_of(const ActivityRef &activity) const
{
  std::vector<const AccessRecord *> out;
  if (auto a = byActivity_.find(activity); a != byActivity_.end())
    for (const auto &[_, r] : a->second)
      out.push_back(&r);
  return out;
}

std::vector<ActivityRef> AccessLedger::activities() const
{
  std::vector<ActivityRef> out;
  for (const auto &[a, _] : byActivity_)
    out.push_back(a);
  return out;
}

std::optional<double> AccessLedger::start_of(const ActivityRef &activity) const
{
  std::optional<double> start;
  for (const auto *r : records_of(activity))
    if (!start || r->checkoutTime < *start)
      start = r->checkoutTime;
  return start;
}

} // namespace csm
