use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, DatasetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Text,
    Number,
    Time,
    Boolean,
    Others,
}

impl ColumnType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "text" => Self::Text,
            "number" => Self::Number,
            "time" => Self::Time,
            "boolean" => Self::Boolean,
            "others" => Self::Others,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Text => "text",
            Self::Number => "number",
            Self::Time => "time",
            Self::Boolean => "boolean",
            Self::Others => "others",
        }
    }
}

/// A column entry. `table` is `None` only for the all-columns entry `*`,
/// which always sits at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub table: Option<usize>,
    pub name_display: String,
    pub name_original: String,
    pub col_type: ColumnType,
}

impl Column {
    pub fn is_all_columns(&self) -> bool {
        self.table.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name_display: String,
    pub name_original: String,
    pub column_indices: Vec<usize>,
}

/// One database schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub db_id: String,
    pub tables: Vec<Table>,
    pub columns: Vec<Column>,
    pub primary_keys: Vec<usize>,
    pub foreign_keys: Vec<(usize, usize)>,
}

impl Schema {
    /// Case-insensitive table lookup by original identifier.
    pub fn table_by_name(&self, name: &str) -> Option<usize> {
        self.tables.iter().position(|t| t.name_original.eq_ignore_ascii_case(name))
    }

    /// Case-insensitive lookup of a column inside one table.
    pub fn column_in_table(&self, table: usize, name: &str) -> Option<usize> {
        self.tables[table]
            .column_indices
            .iter()
            .copied()
            .find(|&c| self.columns[c].name_original.eq_ignore_ascii_case(name))
    }

    pub fn is_primary_key(&self, column: usize) -> bool {
        self.primary_keys.contains(&column)
    }

    fn from_record(rec: SchemaRecord) -> std::result::Result<Self, String> {
        let n_tables = rec.table_names_original.len();
        if rec.table_names.len() != n_tables {
            return Err(format!(
                "table_names has {} entries but table_names_original has {n_tables}",
                rec.table_names.len()
            ));
        }
        let n_cols = rec.column_names_original.len();
        if rec.column_names.len() != n_cols || rec.column_types.len() != n_cols {
            return Err(format!(
                "column arrays disagree in length: column_names {}, column_names_original {n_cols}, column_types {}",
                rec.column_names.len(),
                rec.column_types.len()
            ));
        }
        if n_cols == 0 {
            return Err("missing the all-columns entry".into());
        }

        let mut columns = Vec::with_capacity(n_cols);
        for (i, ((disp_t, disp), ((orig_t, orig), ty))) in
            rec.column_names.iter().zip(rec.column_names_original.iter().zip(&rec.column_types)).enumerate()
        {
            if disp_t != orig_t {
                return Err(format!("column {i}: display and original table index differ"));
            }
            let col_type = ColumnType::parse(ty).ok_or_else(|| format!("column {i}: unknown type `{ty}`"))?;
            let table = match (*orig_t, i) {
                (-1, 0) => None,
                (-1, _) => return Err(format!("column {i}: table index -1 outside position 0")),
                (_, 0) => return Err("column 0 must be the all-columns entry".into()),
                (t, _) if t < 0 || t as usize >= n_tables => {
                    return Err(format!("column {i}: table index {t} out of range"))
                }
                (t, _) => Some(t as usize),
            };
            if table.is_some() && orig.trim().is_empty() {
                return Err(format!("column {i}: empty original name"));
            }
            columns.push(Column { table, name_display: disp.clone(), name_original: orig.clone(), col_type });
        }

        let mut tables: Vec<Table> = rec
            .table_names
            .into_iter()
            .zip(rec.table_names_original)
            .map(|(name_display, name_original)| Table { name_display, name_original, column_indices: Vec::new() })
            .collect();
        for (i, c) in columns.iter().enumerate() {
            if let Some(t) = c.table {
                tables[t].column_indices.push(i);
            }
        }
        if let Some(t) = tables.iter().position(|t| t.column_indices.is_empty()) {
            return Err(format!("table {t} (`{}`) has no columns", tables[t].name_original));
        }

        let in_range = |c: usize| c > 0 && c < n_cols;
        let primary_keys: Vec<usize> = rec.primary_keys.into_iter().flat_map(KeyEntry::into_vec).collect();
        if let Some(&bad) = primary_keys.iter().find(|&&c| !in_range(c)) {
            return Err(format!("primary key {bad} out of range"));
        }
        if let Some(&(a, b)) = rec.foreign_keys.iter().find(|&&(a, b)| !in_range(a) || !in_range(b)) {
            return Err(format!("foreign key ({a}, {b}) out of range"));
        }

        Ok(Schema { db_id: rec.db_id, tables, columns, primary_keys, foreign_keys: rec.foreign_keys })
    }

    fn to_record(&self) -> SchemaRecord {
        let idx = |c: &Column| c.table.map_or(-1, |t| t as i64);
        SchemaRecord {
            db_id: self.db_id.clone(),
            table_names: self.tables.iter().map(|t| t.name_display.clone()).collect(),
            table_names_original: self.tables.iter().map(|t| t.name_original.clone()).collect(),
            column_names: self.columns.iter().map(|c| (idx(c), c.name_display.clone())).collect(),
            column_names_original: self.columns.iter().map(|c| (idx(c), c.name_original.clone())).collect(),
            column_types: self.columns.iter().map(|c| c.col_type.as_str().to_owned()).collect(),
            primary_keys: self.primary_keys.iter().map(|&k| KeyEntry::Single(k)).collect(),
            foreign_keys: self.foreign_keys.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SchemaRecord {
    db_id: String,
    table_names: Vec<String>,
    table_names_original: Vec<String>,
    column_names: Vec<(i64, String)>,
    column_names_original: Vec<(i64, String)>,
    column_types: Vec<String>,
    primary_keys: Vec<KeyEntry>,
    foreign_keys: Vec<(usize, usize)>,
}

/// Some Spider releases list composite primary keys as nested arrays.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum KeyEntry {
    Single(usize),
    Composite(Vec<usize>),
}

impl KeyEntry {
    fn into_vec(self) -> Vec<usize> {
        match self {
            KeyEntry::Single(k) => vec![k],
            KeyEntry::Composite(ks) => ks,
        }
    }
}

/// Schemas indexed by `db_id`, in file order.
#[derive(Debug, Clone, Default)]
pub struct SchemaSet {
    schemas: Vec<Schema>,
    by_id: HashMap<String, usize>,
}

impl SchemaSet {
    pub fn new(schemas: Vec<Schema>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(schemas.len());
        for (i, s) in schemas.iter().enumerate() {
            if by_id.insert(s.db_id.clone(), i).is_some() {
                return Err(DatasetError::DuplicateDbId(s.db_id.clone()));
            }
        }
        Ok(Self { schemas, by_id })
    }

    pub fn get(&self, db_id: &str) -> Option<&Schema> {
        self.by_id.get(db_id).map(|&i| &self.schemas[i])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Schema> {
        self.schemas.iter()
    }

    pub fn len(&self) -> usize {
        self.schemas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemas.is_empty()
    }

    pub fn into_vec(self) -> Vec<Schema> {
        self.schemas
    }
}

impl<'a> IntoIterator for &'a SchemaSet {
    type Item = &'a Schema;
    type IntoIter = std::slice::Iter<'a, Schema>;

    fn into_iter(self) -> Self::IntoIter {
        self.schemas.iter()
    }
}

/// Parse a Spider `tables.json` document.
pub fn parse_schemas(json: &str, path: &Path) -> Result<SchemaSet> {
    let raw: Vec<serde_json::Value> =
        serde_json::from_str(json).map_err(|source| DatasetError::Json { path: path.to_path_buf(), source })?;
    let mut schemas = Vec::with_capacity(raw.len());
    for (index, value) in raw.into_iter().enumerate() {
        let db_id = value.get("db_id").and_then(|v| v.as_str()).map(str::to_owned);
        let record: SchemaRecord = serde_json::from_value(value).map_err(|e| DatasetError::Record {
            index,
            db_id: db_id.clone(),
            message: e.to_string(),
        })?;
        let schema = Schema::from_record(record).map_err(|message| DatasetError::Record { index, db_id, message })?;
        schemas.push(schema);
    }
    SchemaSet::new(schemas)
}

pub fn load_schemas(path: impl AsRef<Path>) -> Result<SchemaSet> {
    let path = path.as_ref();
    parse_schemas(&read_file(path)?, path)
}

/// Serialize schemas back into the Spider interchange format.
pub fn schemas_to_json<'a>(schemas: impl IntoIterator<Item = &'a Schema>) -> String {
    let records: Vec<SchemaRecord> = schemas.into_iter().map(Schema::to_record).collect();
    serde_json::to_string_pretty(&records).expect("schema records always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"[{
        "db_id": "shop",
        "table_names": ["customers", "store name"],
        "table_names_original": ["Customers", "StoreName"],
        "column_names": [[-1, "*"], [0, "id"], [0, "name"], [0, "store id"], [1, "id"], [1, "title"]],
        "column_names_original": [[-1, "*"], [0, "id"], [0, "name"], [0, "store_id"], [1, "id"], [1, "title"]],
        "column_types": ["text", "number", "text", "number", "number", "text"],
        "primary_keys": [1, [4]],
        "foreign_keys": [[3, 4]]
    }]"#;

    fn parse(s: &str) -> Result<SchemaSet> {
        parse_schemas(s, Path::new("fixture.json"))
    }

    #[test]
    fn hand_counted_fixture() {
        let set = parse(FIXTURE).unwrap();
        let s = set.get("shop").unwrap();
        assert_eq!(s.tables.len(), 2);
        assert_eq!(s.columns.len(), 6);
        assert!(s.columns[0].is_all_columns());
        assert_eq!(s.tables[0].column_indices, vec![1, 2, 3]);
        assert_eq!(s.tables[1].column_indices, vec![4, 5]);
        assert_eq!(s.primary_keys, vec![1, 4]);
        assert_eq!(s.table_by_name("storename"), Some(1));
        assert_eq!(s.column_in_table(0, "STORE_ID"), Some(3));
    }

    #[test]
    fn empty_list() {
        assert!(parse("[]").unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let set = parse(FIXTURE).unwrap();
        let again = parse(&schemas_to_json(&set)).unwrap();
        assert_eq!(set.into_vec(), again.into_vec());
    }

    #[test]
    fn duplicate_db_id() {
        let body = FIXTURE.trim().trim_start_matches('[').trim_end_matches(']');
        let doubled = format!("[{body},{body}]");
        assert!(matches!(parse(&doubled), Err(DatasetError::DuplicateDbId(id)) if id == "shop"));
    }

    #[test]
    fn malformed_record_is_named() {
        let bad = FIXTURE
            .replace("\"number\", \"text\", \"number\", \"number\"", "\"number\", \"text\", \"blob\", \"number\"");
        let err = parse(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("record 0") && msg.contains("shop") && msg.contains("blob"), "{msg}");
    }

    #[test]
    fn foreign_key_on_star_rejected() {
        let bad = FIXTURE.replace("[[3, 4]]", "[[0, 4]]");
        assert!(matches!(parse(&bad), Err(DatasetError::Record { .. })));
    }

    #[test]
    fn not_json_array() {
        assert!(matches!(parse("{}"), Err(DatasetError::Json { .. })));
    }
}
