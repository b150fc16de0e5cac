//! Line-oriented text format for constraint networks.
//!
//! ```text
//! # comment
//! var <name> <lo> <hi>
//! eq <name> <value>
//! alldiff <name>...
//! lin <c1> <v1> ... <ck> <vk> <op> <rhs>     op is = or <=
//! prec <before> <after> <dur_before> [gap]
//! cumulative <capacity> <k>
//! task <start_var> <dur> <demand>            exactly k of these follow
//! minimize <name>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use icp_core::cp::{Constraint, ConstraintNetwork, Cumulative, CumulativeTask, Linear, Precedence, VarId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

struct Parser {
    network: ConstraintNetwork,
    names: BTreeMap<String, VarId>,
    /// Open `cumulative` block: capacity, expected task count, tasks so far,
    /// and the line it started on.
    block: Option<(i64, usize, Vec<CumulativeTask>, usize)>,
    objective_line: Option<usize>,
}

fn int(token: &str, what: &str) -> Result<i64, String> {
    token.parse().map_err(|_| format!("{what} must be an integer, found `{token}`"))
}

impl Parser {
    fn var(&self, name: &str) -> Result<VarId, String> {
        self.names.get(name).copied().ok_or_else(|| format!("undeclared variable `{name}`"))
    }

    fn directive(&mut self, tokens: &[&str], line: usize) -> Result<(), String> {
        let (head, args) = (tokens[0], &tokens[1..]);
        if head == "task" {
            let Some((_, k, tasks, _)) = self.block.as_mut() else {
                return Err("`task` outside a cumulative block".into());
            };
            let [start, dur, demand] = args else {
                return Err("expected `task <start_var> <dur> <demand>`".into());
            };
            let start = self.names.get(*start).copied().ok_or_else(|| format!("undeclared variable `{start}`"))?;
            let duration = int(dur, "duration")?;
            let demand = int(demand, "demand")?;
            if duration < 0 || demand < 0 {
                return Err("duration and demand must be non-negative".into());
            }
            tasks.push(CumulativeTask { start, duration, demand });
            if tasks.len() == *k {
                let (capacity, _, tasks, _) = self.block.take().unwrap();
                self.network.post(Constraint::Cumulative(Cumulative { tasks, capacity }));
            }
            return Ok(());
        }
        if let Some((_, k, tasks, _)) = &self.block {
            return Err(format!("expected {} more `task` lines", k - tasks.len()));
        }
        match head {
            "var" => {
                let [name, lo, hi] = args else {
                    return Err("expected `var <name> <lo> <hi>`".into());
                };
                if self.names.contains_key(*name) {
                    return Err(format!("duplicate variable `{name}`"));
                }
                let (lo, hi) = (int(lo, "lower bound")?, int(hi, "upper bound")?);
                if lo > hi {
                    return Err(format!("empty range {lo}..{hi}"));
                }
                let v = self.network.add_var(*name, lo, hi);
                self.names.insert(name.to_string(), v);
            }
            "eq" => {
                let [name, value] = args else {
                    return Err("expected `eq <name> <value>`".into());
                };
                let c = Constraint::EqConst(self.var(name)?, int(value, "value")?);
                self.network.post(c);
            }
            "alldiff" => {
                if args.is_empty() {
                    return Err("`alldiff` needs at least one variable".into());
                }
                let vars = args.iter().map(|n| self.var(n)).collect::<Result<_, _>>()?;
                self.network.post(Constraint::AllDifferent(vars));
            }
            "lin" => {
                if args.len() < 4 || args.len() % 2 != 0 {
                    return Err("expected `lin <c1> <v1> ... <op> <rhs>`".into());
                }
                let (pairs, tail) = args.split_at(args.len() - 2);
                let terms = pairs
                    .chunks(2)
                    .map(|p| Ok((int(p[0], "coefficient")?, self.var(p[1])?)))
                    .collect::<Result<Vec<_>, String>>()?;
                let linear = Linear::new(terms, int(tail[1], "right-hand side")?);
                let c = match tail[0] {
                    "=" => Constraint::LinearEq(linear),
                    "<=" => Constraint::LinearLe(linear),
                    op => return Err(format!("unknown operator `{op}`, expected = or <=")),
                };
                self.network.post(c);
            }
            "prec" => {
                let (before, after, dur, gap) = match args {
                    [b, a, d] => (b, a, d, "0"),
                    [b, a, d, g] => (b, a, d, *g),
                    _ => return Err("expected `prec <before> <after> <dur_before> [gap]`".into()),
                };
                let p = Precedence {
                    before: self.var(before)?,
                    after: self.var(after)?,
                    duration: int(dur, "duration")?,
                    gap: int(gap, "gap")?,
                };
                self.network.post(Constraint::Precedence(p));
            }
            "cumulative" => {
                let [capacity, k] = args else {
                    return Err("expected `cumulative <capacity> <k>`".into());
                };
                let capacity = int(capacity, "capacity")?;
                let k: usize = k.parse().map_err(|_| format!("task count must be a non-negative integer, found `{k}`"))?;
                if capacity < 0 {
                    return Err("capacity must be non-negative".into());
                }
                if k == 0 {
                    self.network.post(Constraint::Cumulative(Cumulative { tasks: Vec::new(), capacity }));
                } else {
                    self.block = Some((capacity, k, Vec::with_capacity(k), line));
                }
            }
            "minimize" => {
                let [name] = args else {
                    return Err("expected `minimize <name>`".into());
                };
                if let Some(first) = self.objective_line {
                    return Err(format!("second `minimize`, the first is on line {first}"));
                }
                let v = self.var(name)?;
                self.network.set_objective(v);
                self.objective_line = Some(line);
            }
            other => return Err(format!("unknown directive `{other}`")),
        }
        Ok(())
    }
}

pub fn parse_instance(text: &str) -> Result<ConstraintNetwork, ParseError> {
    let mut p = Parser { network: ConstraintNetwork::new(), names: BTreeMap::new(), block: None, objective_line: None };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        p.directive(&tokens, line).map_err(|message| ParseError { line, message })?;
    }
    if let Some((_, k, tasks, line)) = p.block {
        return Err(ParseError {
            line: last.max(line),
            message: format!("cumulative block from line {line} has {} of {k} tasks", tasks.len()),
        });
    }
    Ok(p.network)
}

/// Writes `network` in the format [`parse_instance`] reads. Variable names
/// must be free of whitespace and `#`.
pub fn write_instance(network: &ConstraintNetwork) -> String {
    let name = |v: VarId| network.name(v);
    let mut out = String::new();
    for v in network.vars() {
        let (lo, hi) = network.bounds(v);
        writeln!(out, "var {} {lo} {hi}", name(v)).unwrap();
    }
    for c in network.constraints() {
        match c {
            Constraint::EqConst(v, value) => writeln!(out, "eq {} {value}", name(*v)).unwrap(),
            Constraint::AllDifferent(vars) => {
                let names: Vec<&str> = vars.iter().map(|&v| name(v)).collect();
                writeln!(out, "alldiff {}", names.join(" ")).unwrap();
            }
            Constraint::LinearEq(l) | Constraint::LinearLe(l) => {
                let op = if matches!(c, Constraint::LinearEq(_)) { "=" } else { "<=" };
                out.push_str("lin");
                for &(coef, v) in &l.terms {
                    write!(out, " {coef} {}", name(v)).unwrap();
                }
                writeln!(out, " {op} {}", l.rhs).unwrap();
            }
            Constraint::Precedence(p) => {
                writeln!(out, "prec {} {} {} {}", name(p.before), name(p.after), p.duration, p.gap).unwrap();
            }
            Constraint::Cumulative(cu) => {
                writeln!(out, "cumulative {} {}", cu.capacity, cu.tasks.len()).unwrap();
                for t in &cu.tasks {
                    writeln!(out, "task {} {} {}", name(t.start), t.duration, t.demand).unwrap();
                }
            }
        }
    }
    if let Some(obj) = network.objective() {
        writeln!(out, "minimize {}", name(obj)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two tasks on one machine
var a 0 5
var b 0 5
var m 0 10
cumulative 1 2
task a 2 1
task b 3 1   # longer
prec a b 2
lin 1 a -1 m <= -2
lin 1 b -1 m <= -3
minimize m
";

    #[test]
    fn parses_every_directive() {
        let n = parse_instance(SMALL).unwrap();
        assert_eq!(n.num_vars(), 3);
        assert_eq!(n.constraints().len(), 4);
        assert_eq!(n.objective(), Some(VarId(2)));
        assert_eq!(n.var_by_name("b"), Some(VarId(1)));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let n = parse_instance(SMALL).unwrap();
        assert_eq!(parse_instance(&write_instance(&n)).unwrap(), n);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("var x 0 3\nfoo x\n", 2),
            ("var x 0 3\nvar x 1 2\n", 2),
            ("var x 0 3\neq y 1\n", 2),
            ("\n\nvar x 3 0\n", 3),
            ("var x 0 3\nlin 1 x < 2\n", 2),
            ("var x 0 3\nminimize x\nminimize x\n", 3),
            ("var x 0 3\ncumulative 1 2\ntask x 1 1\n", 3),
            ("var x 0 3\ncumulative 1 2\ntask x 1 1\neq x 1\n", 4),
            ("task x 1 1\n", 1),
            ("var x 0 three\n", 1),
        ];
        for (text, line) in cases {
            let err = parse_instance(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
        }
    }

    #[test]
    fn gap_defaults_to_zero() {
        let n = parse_instance("var a 0 1\nvar b 0 9\nprec a b 3\n").unwrap();
        assert_eq!(
            n.constraints()[0],
            Constraint::Precedence(Precedence { before: VarId(0), after: VarId(1), duration: 3, gap: 0 })
        );
    }
}
