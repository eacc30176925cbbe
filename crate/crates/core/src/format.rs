//! ASCII rendering of relations and changelogs.

use crate::model::{ChangelogRow, Relation, Row, Schema};

fn render_row(schema: &Schema, row: &Row) -> Vec<String> {
    row.0.iter().zip(&schema.columns).map(|(v, c)| v.render(c.format)).collect()
}

fn draw(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for cells in body {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.chars().count());
        }
    }
    let border = "-".repeat(widths.iter().map(|w| w + 3).sum::<usize>() + 1);
    let line = |cells: &[String]| {
        let mut s = String::from("|");
        for (c, w) in cells.iter().zip(&widths) {
            s.push_str(&format!(" {c:<w$} |"));
        }
        s
    };
    let mut out = vec![border.clone(), line(header), border.clone()];
    out.extend(body.iter().map(|cells| line(cells)));
    out.push(border);
    out.join("\n") + "\n"
}

fn headers(schema: &Schema) -> Vec<String> {
    schema.columns.iter().map(|c| c.display.clone()).collect()
}

/// Table view with rows sorted by value, left to right.
pub fn format_table(rel: &Relation) -> String {
    let body: Vec<Vec<String>> = rel.sorted_rows().iter().map(|r| render_row(&rel.schema, r)).collect();
    draw(&headers(&rel.schema), &body)
}

/// Changelog in emission order with `undo`, `ptime` and `ver` columns.
/// `open_ended` appends a `...` line for streams that may still grow.
pub fn format_changelog(rows: &[ChangelogRow], schema: &Schema, open_ended: bool) -> String {
    let mut header = headers(schema);
    header.extend(["undo", "ptime", "ver"].map(String::from));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|c| {
            let mut cells = render_row(schema, &c.row);
            cells.push(if c.undo { "undo".into() } else { String::new() });
            cells.push(c.ptime.to_string());
            cells.push(c.ver.to_string());
            cells
        })
        .collect();
    let mut out = draw(&header, &body);
    if open_ended {
        out.push_str("...\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ColumnDef, DisplayFormat, Value, ValueKind};
    use crate::time::Timestamp;

    fn schema() -> Schema {
        Schema::new(
            vec![
                ColumnDef::event_time("wend"),
                ColumnDef::new("price", ValueKind::Integer).with_format(DisplayFormat::Dollar),
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn table_layout() {
        let rows = vec![
            Row(vec![Value::Timestamp(Timestamp::hm(8, 20)), Value::Integer(10)]),
            Row(vec![Value::Timestamp(Timestamp::hm(8, 10)), Value::Null]),
        ];
        let expect = "\
----------------
| wend | price |
----------------
| 8:10 |       |
| 8:20 | $10   |
----------------
";
        assert_eq!(format_table(&Relation::new(schema(), rows)), expect);
    }

    #[test]
    fn empty_changelog_is_header_only() {
        let out = format_changelog(&[], &schema(), true);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[1], "| wend | price | undo | ptime | ver |");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "...");
        assert!(lines[0].len() == lines[1].len() && lines[0] == lines[2] && lines[0] == lines[3]);
    }
}
