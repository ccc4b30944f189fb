#pragma once

#include <string>
#include <vector>

#include "primscope/verbose_log.hpp"

namespace primscope::testing {

inline TensorDesc tensor(TensorRole role, DataType dtype, std::string tag = "undef",
                         std::string extra = "") {
  TensorDesc td;
  td.role = role;
  td.data_type = dtype;
  td.layout_tag = std::move(tag);
  td.extra = std::move(extra);
  return td;
}

inline PrimitiveRecord record(PrimitiveKind kind, Direction dir, double time_ms,
                              std::vector<TensorDesc> tensors = {}, std::string problem = "") {
  PrimitiveRecord rec;
  rec.event_kind = EventKind::exec;
  rec.primitive_kind = kind;
  rec.direction = dir;
  rec.tensors = std::move(tensors);
  rec.problem = std::move(problem);
  rec.dims = parse_problem_dims(rec.problem);
  rec.time_ms = time_ms;
  return rec;
}

inline ProfileLog log_of(std::vector<PrimitiveRecord> records) {
  ProfileLog log;
  log.lines_total = records.size();
  log.records = std::move(records);
  return log;
}

}  // namespace primscope::testing
