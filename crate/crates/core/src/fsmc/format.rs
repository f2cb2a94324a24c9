//! TOML representation of a channel, in the style of the automaton format.
//!
//! ```toml
//! inputs = ["0:a", "1:a"]
//! outputs = ["0", "1"]
//! states = ["s", "t"]
//! initial = "s"
//!
//! # rows[output][previous state]
//! [output_law]
//! "0:a" = [[1, "1/2"], [0, "1/2"]]
//! "1:a" = [[0, "1/2"], [1, "1/2"]]
//!
//! # rows[next state][previous state]
//! [state_law]
//! "0:a" = [[0, 0], [1, 1]]
//! "1:a" = [[0, 0], [1, 1]]
//! ```

use toml::de::DeValue;

use super::Fsmc;
use crate::error::{Error, Result};
use crate::pfa::format::{lookup, Located};
use crate::rational::{format_rational, Rational};

fn transpose(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| rows.iter().map(|r| r.get(c).cloned().unwrap_or_default()).collect())
        .collect()
}

pub fn parse_fsmc(src: &str) -> Result<Fsmc> {
    let loc = Located::new(src);
    let doc = loc.parse_table()?;
    let inputs = loc.strings(loc.field(&doc, "inputs")?, "`inputs`")?;
    let outputs = loc.strings(loc.field(&doc, "outputs")?, "`outputs`")?;
    let states = loc.strings(loc.field(&doc, "states")?, "`states`")?;
    let initial_v = loc.field(&doc, "initial")?;
    let initial_name = loc.string(initial_v, "`initial`")?;
    let initial = states
        .iter()
        .position(|s| *s == initial_name)
        .ok_or_else(|| loc.err(&initial_v.span(), format!("unknown state `{initial_name}`")))?;

    let mut laws = Vec::new();
    for (key, rows_len) in [("output_law", outputs.len()), ("state_law", states.len())] {
        let v = loc.field(&doc, key)?;
        let table = match v.get_ref() {
            DeValue::Table(t) => t,
            _ => return Err(loc.err(&v.span(), format!("`{key}` must be a table"))),
        };
        let mut per_input = Vec::with_capacity(inputs.len());
        for input in &inputs {
            let m = lookup(table, input)
                .ok_or_else(|| loc.err(&v.span(), format!("`{key}` has no entry for `{input}`")))?;
            let rows = loc.matrix(m, &format!("`{key}` for `{input}`"))?;
            if rows.len() != rows_len || rows.iter().any(|r| r.len() != states.len()) {
                return Err(loc.err(
                    &m.span(),
                    format!(
                        "`{key}` for `{input}` must be {rows_len}x{} (rows x previous states)",
                        states.len()
                    ),
                ));
            }
            per_input.push((transpose(&rows), m.span()));
        }
        laws.push(per_input);
    }
    let state_law = laws.pop().unwrap_or_default();
    let output_law = laws.pop().unwrap_or_default();

    // Validate column by column first so errors can point at a line.
    for (x, ((out, out_span), (st, st_span))) in output_law.iter().zip(&state_law).enumerate() {
        for s in 0..states.len() {
            for (law, span, what) in [(&out[s], out_span, "output_law"), (&st[s], st_span, "state_law")] {
                let total: Rational = law.iter().sum();
                if law.iter().any(|p| *p < Rational::default()) || total != Rational::from_integer(1.into()) {
                    return Err(loc.err(
                        span,
                        format!(
                            "`{what}` for `{}`: column {s} sums to {} or has a negative entry",
                            inputs[x],
                            format_rational(&total)
                        ),
                    ));
                }
            }
        }
    }

    Fsmc::new(
        inputs,
        outputs,
        states,
        output_law.into_iter().map(|(m, _)| m).collect(),
        state_law.into_iter().map(|(m, _)| m).collect(),
        initial,
    )
    .map_err(|e| match e {
        Error::InvalidChannel(m) => Error::Parse { line: 1, message: m },
        other => other,
    })
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn list(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

pub fn write_fsmc(ch: &Fsmc) -> String {
    let mut out = String::new();
    out.push_str(&format!("inputs = [{}]\n", list(ch.inputs().iter().map(|s| quote(s)))));
    out.push_str(&format!("outputs = [{}]\n", list(ch.outputs().iter().map(|s| quote(s)))));
    out.push_str(&format!("states = [{}]\n", list(ch.states().iter().map(|s| quote(s)))));
    out.push_str(&format!("initial = {}\n", quote(&ch.states()[ch.initial()])));
    let ns = ch.states().len();
    for (key, rows) in [("output_law", ch.outputs().len()), ("state_law", ns)] {
        out.push_str(&format!("\n[{key}]\n"));
        for (x, name) in ch.inputs().iter().enumerate() {
            out.push_str(&format!("{} = [\n", quote(name)));
            for r in 0..rows {
                let cells = (0..ns).map(|s| {
                    let law = if key == "output_law" {
                        ch.output_law(x, s)
                    } else {
                        ch.state_law(x, s)
                    };
                    quote(&format_rational(&law[r]))
                });
                out.push_str(&format!("  [{}],\n", list(cells)));
            }
            out.push_str("]\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsmc::build_v;
    use crate::fsmc::tests::toy;
    use crate::pfa::fixtures::example1;

    #[test]
    fn round_trip() {
        for ch in [toy(), build_v(&example1()).unwrap().fsmc().clone()] {
            assert_eq!(parse_fsmc(&write_fsmc(&ch)).unwrap(), ch);
        }
    }

    #[test]
    fn bad_column_points_at_its_line() {
        let text = write_fsmc(&toy()).replace("\"2/3\"", "\"1/3\"");
        match parse_fsmc(&text) {
            Err(Error::Parse { line, message }) => {
                assert!(line > 5, "{line}");
                assert!(message.contains("column"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
