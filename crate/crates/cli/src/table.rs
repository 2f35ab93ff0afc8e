//! Aligned plain-text tables.

/// Render rows as left-aligned columns separated by two spaces. The first
/// row is treated as a header and underlined.
pub fn render(rows: &[Vec<String>]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (index, cell) in row.iter().enumerate() {
            widths[index] = widths[index].max(cell.len());
        }
    }
    let format_row = |row: &[String]| -> String {
        let mut line = String::new();
        for (index, cell) in row.iter().enumerate() {
            if index > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if index + 1 < row.len() {
                for _ in cell.len()..widths[index] {
                    line.push(' ');
                }
            }
        }
        line
    };

    let mut out = String::new();
    for (index, row) in rows.iter().enumerate() {
        out.push_str(&format_row(row));
        out.push('\n');
        if index == 0 && rows.len() > 1 {
            let underline: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(column, _)| "-".repeat(widths[column]))
                .collect();
            out.push_str(&format_row(&underline));
            out.push('\n');
        }
    }
    out
}

pub fn row<S: ToString>(cells: &[S]) -> Vec<String> {
    cells.iter().map(ToString::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligns_columns() {
        let rendered = render(&[
            row(&["pos", "n", "accuracy"]),
            row(&["adjective", "400", "0.8700"]),
            row(&["noun", "1200", "0.9012"]),
        ]);
        let lines: Vec<&str> = rendered.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("pos        n     accuracy"));
        assert!(lines[1].starts_with("---"));
        assert!(lines[2].starts_with("adjective  400   0.8700"));
    }

    #[test]
    fn empty_input_renders_empty() {
        assert_eq!(render(&[]), "");
    }
}
