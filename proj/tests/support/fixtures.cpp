#include "fixtures.hpp"

namespace fixtures {

using namespace astres::schema;

SchemaCatalog student_transcripts() {
  SchemaCatalog c;
  c.db_id = "student_transcripts";
  c.tables = {{"Departments", "departments"}, {"Degree_Programs", "degree programs"}};
  c.columns = {
      {TableId{0}, "department_id", "department id", ColumnType::Number, {}},
      {TableId{0}, "department_name", "department name", ColumnType::Text, {"engineer", "statistics", "medical"}},
      {TableId{0}, "department_description", "department description", ColumnType::Text, {}},
      {TableId{1}, "degree_program_id", "degree program id", ColumnType::Number, {}},
      {TableId{1}, "department_id", "department id", ColumnType::Number, {}},
      {TableId{1}, "degree_summary_name", "degree summary name", ColumnType::Text, {"PHD", "Master", "Bachelor"}},
      {TableId{1}, "degree_summary_description", "degree summary description", ColumnType::Text, {}},
  };
  c.primary_keys = {ColumnId{0}, ColumnId{3}};
  c.foreign_keys = {{ColumnId{4}, ColumnId{0}}};
  return c;
}

SubSchema degrees_sub_schema(const SchemaCatalog &catalog) {
  SubSchema sub;
  sub.db_id = catalog.db_id;
  sub.tables = {TableId{0}, TableId{1}};
  for (std::size_t c : {0, 1, 3, 4, 5})
    sub.columns[ColumnId{c}] = Provenance::ApproxQuery;
  return sub;
}

astres::examples::SelectionResult degrees_examples() {
  astres::examples::SelectionResult r;
  r.chosen = {
      {"dev_cis", "How many courses does the department of Computer Information Systems offer?",
       "SELECT count(*) FROM department AS T1 JOIN course AS T2 ON T1.dept_code = T2.dept_code WHERE dept_name = "
       "\"Computer Info.Systems\"",
       0.9, 3},
      {"dev_singers", "How many singers do we have?", "SELECT count(*) FROM singer", 0.95, 0},
  };
  r.pool_size = 2;
  return r;
}

} // namespace fixtures
