//! Tabular output with a metadata header, written as CSV or JSON.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;

/// Status of a row whose numbers are all finite.
pub const OK: &str = "ok";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    cells: Vec<Cell>,
    status: String,
}

impl Row {
    pub fn new(status: impl Into<String>) -> Self {
        Self {
            cells: Vec::new(),
            status: status.into(),
        }
    }

    /// A row of `width` empty cells carrying `status`.
    pub fn blank(width: usize, status: impl Into<String>) -> Self {
        Self {
            cells: vec![Cell::Empty; width],
            status: status.into(),
        }
    }

    pub fn num(mut self, x: f64) -> Self {
        self.cells.push(Cell::Num(x));
        self
    }

    pub fn int(mut self, n: usize) -> Self {
        self.cells.push(Cell::Int(n));
        self
    }

    pub fn empty(mut self) -> Self {
        self.cells.push(Cell::Empty);
        self
    }

    /// Blanks non-finite numbers and flags the row.
    fn sanitized(mut self) -> Self {
        let mut bad = false;
        for c in &mut self.cells {
            if matches!(c, Cell::Num(x) if !x.is_finite()) {
                *c = Cell::Empty;
                bad = true;
            }
        }
        if bad && self.status == OK {
            self.status = "non_finite".into();
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Section {
    pub fn new(name: &str, columns: &[&str], rows: Vec<Row>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.cells.len(), columns.len(), "row width in section {name}");
                r.sanitized()
            })
            .collect();
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub metadata: Vec<(String, Value)>,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.push((key.into(), value.into()));
    }

    /// Finite numbers as JSON numbers, everything else as null.
    pub fn meta_num(&mut self, key: &str, x: f64) {
        let value = if x.is_finite() { Value::from(x) } else { Value::Null };
        self.meta(key, value);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (key, value) in &self.metadata {
            writeln!(out, "# {key}: {value}")?;
        }
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            if self.sections.len() > 1 {
                writeln!(out, "# section: {}", section.name)?;
            }
            writeln!(out, "{},status", section.columns.join(","))?;
            for row in &section.rows {
                for cell in &row.cells {
                    match cell {
                        Cell::Num(x) => write!(out, "{x:.16e},")?,
                        Cell::Int(n) => write!(out, "{n},")?,
                        Cell::Empty => write!(out, ",")?,
                    }
                }
                writeln!(out, "{}", row.status)?;
            }
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut root = Map::new();
        root.insert("metadata".into(), Value::Object(self.metadata.iter().cloned().collect()));
        for section in &self.sections {
            let rows = section
                .rows
                .iter()
                .map(|row| {
                    let mut record: Map<String, Value> = section
                        .columns
                        .iter()
                        .zip(&row.cells)
                        .map(|(c, cell)| {
                            let v = match cell {
                                Cell::Num(x) => Value::from(*x),
                                Cell::Int(n) => Value::from(*n),
                                Cell::Empty => Value::Null,
                            };
                            (c.clone(), v)
                        })
                        .collect();
                    record.insert("status".into(), Value::from(row.status.clone()));
                    Value::Object(record)
                })
                .collect();
            root.insert(section.name.clone(), Value::Array(rows));
        }
        serde_json::to_writer_pretty(&mut *out, &Value::Object(root))?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(doc: &Document, format: Format) -> String {
        let mut buf = Vec::new();
        doc.write(format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn non_finite_cells_are_blanked_and_flagged() {
        let rows = vec![Row::new(OK).num(1.0).num(f64::NAN), Row::new(OK).num(2.0).num(0.5)];
        let mut doc = Document::default();
        doc.meta("command", "test");
        doc.sections.push(Section::new("rows", &["a", "b"], rows));
        let csv = render(&doc, Format::Csv);
        assert_eq!(
            csv,
            "# command: \"test\"\na,b,status\n1.0000000000000000e0,,non_finite\n2.0000000000000000e0,5.0000000000000000e-1,ok\n"
        );
        let json: Value = serde_json::from_str(&render(&doc, Format::Json)).unwrap();
        assert_eq!(json["rows"][0]["b"], Value::Null);
        assert_eq!(json["rows"][0]["status"], "non_finite");
        assert_eq!(json["rows"][1]["b"], 0.5);
    }

    #[test]
    fn csv_numbers_round_trip() {
        let x = 0.1f64 + 0.2;
        let doc = Document {
            metadata: Vec::new(),
            sections: vec![Section::new("rows", &["x"], vec![Row::new(OK).num(x)])],
        };
        let csv = render(&doc, Format::Csv);
        let cell = csv.lines().nth(1).unwrap().split(',').next().unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn several_sections_are_labelled() {
        let doc = Document {
            metadata: Vec::new(),
            sections: vec![
                Section::new("first", &["n"], vec![Row::new(OK).int(3)]),
                Section::new("second", &["x"], vec![Row::blank(1, "vacuum")]),
            ],
        };
        assert_eq!(
            render(&doc, Format::Csv),
            "# section: first\nn,status\n3,ok\n\n# section: second\nx,status\n,vacuum\n"
        );
    }
}
