//! Plain-text file formats: instances, flows, solutions, round plans.
//!
//! One record per line; `#` starts a comment and blank lines are skipped.
//! Numbers are read as integers, decimals, or `p/q` fractions and always
//! written back as reduced integers or fractions, so equal data makes
//! equal bytes. Stats trailers are comments, which keeps every emitted
//! file valid as input.

use std::fmt;
use std::fmt::Write as _;

use unsplit_core::flow::Decomposition;
use unsplit_core::solver::SolveStats;
use unsplit_core::{
    best_round, parse_rational, rat, validate_instance, ArcId, Flow, Instance, PathFlow, Rational,
    Round, RoundPlan, UnsplittableSolution, VertexId,
};

/// A malformed record and where it was found; line 0 means the file as
/// a whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

fn fail(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// Renders a rational as `p` or `p/q`, always reduced.
pub fn number(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_number(token: &str, line: usize) -> Result<Rational, FormatError> {
    parse_rational(token).map_err(|e| fail(line, format!("bad number `{token}`: {e}")))
}

fn parse_id(token: &str, line: usize) -> Result<u32, FormatError> {
    token
        .parse::<u32>()
        .map_err(|_| fail(line, format!("bad id `{token}`")))
}

/// Records of a file, comments and blanks removed, with line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((idx + 1, tokens))
    })
}

fn expect_len(tokens: &[&str], want: usize, line: usize, shape: &str) -> Result<(), FormatError> {
    if tokens.len() == want {
        Ok(())
    } else {
        Err(fail(line, format!("expected `{shape}`")))
    }
}

/// Reads `v <id> <balance>` and `a <id> <tail> <head> <capacity>` lines
/// into a checked instance.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut vertices = Vec::new();
    let mut arcs = Vec::new();
    for (line, tokens) in records(text) {
        match tokens[0] {
            "v" => {
                expect_len(&tokens, 3, line, "v <id> <balance>")?;
                vertices.push((VertexId(parse_id(tokens[1], line)?), parse_number(tokens[2], line)?));
            }
            "a" => {
                expect_len(&tokens, 5, line, "a <id> <tail> <head> <capacity>")?;
                arcs.push((
                    ArcId(parse_id(tokens[1], line)?),
                    VertexId(parse_id(tokens[2], line)?),
                    VertexId(parse_id(tokens[3], line)?),
                    parse_number(tokens[4], line)?,
                ));
            }
            other => return Err(fail(line, format!("unknown record `{other}`"))),
        }
    }
    let inst = Instance::new(vertices, arcs).map_err(|e| fail(0, e.to_string()))?;
    if let Some(issue) = validate_instance(&inst).first() {
        return Err(fail(0, issue.to_string()));
    }
    Ok(inst)
}

/// Reads only the shape of an instance file: vertex ids and arc
/// endpoints. Balance and capacity fields must parse but are
/// discarded.
pub fn parse_skeleton(
    text: &str,
) -> Result<(Vec<VertexId>, Vec<(ArcId, VertexId, VertexId)>), FormatError> {
    let mut vertices = Vec::new();
    let mut arcs = Vec::new();
    for (line, tokens) in records(text) {
        match tokens[0] {
            "v" => {
                expect_len(&tokens, 3, line, "v <id> <balance>")?;
                parse_number(tokens[2], line)?;
                vertices.push(VertexId(parse_id(tokens[1], line)?));
            }
            "a" => {
                expect_len(&tokens, 5, line, "a <id> <tail> <head> <capacity>")?;
                parse_number(tokens[4], line)?;
                arcs.push((
                    ArcId(parse_id(tokens[1], line)?),
                    VertexId(parse_id(tokens[2], line)?),
                    VertexId(parse_id(tokens[3], line)?),
                ));
            }
            other => return Err(fail(line, format!("unknown record `{other}`"))),
        }
    }
    Ok((vertices, arcs))
}

pub fn emit_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for &v in inst.vertex_ids() {
        writeln!(out, "v {v} {}", number(inst.balance(v))).unwrap();
    }
    for arc in inst.arcs() {
        writeln!(
            out,
            "a {} {} {} {}",
            arc.id,
            arc.tail,
            arc.head,
            number(&arc.capacity)
        )
        .unwrap();
    }
    out
}

/// Reads `f <arc-id> <value>` lines; arcs not mentioned carry zero.
pub fn parse_flow(text: &str, inst: &Instance) -> Result<Flow, FormatError> {
    let mut pairs = Vec::new();
    for (line, tokens) in records(text) {
        if tokens[0] != "f" {
            return Err(fail(line, format!("unknown record `{}`", tokens[0])));
        }
        expect_len(&tokens, 3, line, "f <arc-id> <value>")?;
        pairs.push((
            ArcId(parse_id(tokens[1], line)?),
            parse_number(tokens[2], line)?,
        ));
    }
    Flow::from_pairs(inst, pairs).map_err(|e| fail(0, e.to_string()))
}

pub fn emit_flow(inst: &Instance, flow: &Flow) -> String {
    let mut out = String::new();
    for arc in inst.arcs() {
        writeln!(out, "f {} {}", arc.id, number(flow.value(inst, arc.id))).unwrap();
    }
    out
}

fn parse_path(tokens: &[&str], line: usize) -> Result<PathFlow, FormatError> {
    if tokens.len() < 5 {
        return Err(fail(line, "expected `p <source> <sink> <value> <arc-id ...>`"));
    }
    let arcs = tokens[4..]
        .iter()
        .map(|t| Ok(ArcId(parse_id(t, line)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(PathFlow {
        source: VertexId(parse_id(tokens[1], line)?),
        sink: VertexId(parse_id(tokens[2], line)?),
        value: parse_number(tokens[3], line)?,
        arcs,
    })
}

/// Reads `p <source> <sink> <value> <arc-id ...>` lines.
pub fn parse_solution(text: &str) -> Result<UnsplittableSolution, FormatError> {
    let mut paths = Vec::new();
    for (line, tokens) in records(text) {
        if tokens[0] != "p" {
            return Err(fail(line, format!("unknown record `{}`", tokens[0])));
        }
        paths.push(parse_path(&tokens, line)?);
    }
    Ok(UnsplittableSolution { paths })
}

fn push_path(out: &mut String, path: &PathFlow) {
    write!(out, "p {} {} {}", path.source, path.sink, number(&path.value)).unwrap();
    for a in &path.arcs {
        write!(out, " {a}").unwrap();
    }
    out.push('\n');
}

/// Writes a solution, with the run's counters as a comment trailer when
/// they are at hand.
pub fn emit_solution(sol: &UnsplittableSolution, stats: Option<&SolveStats>) -> String {
    let mut out = String::new();
    for path in &sol.paths {
        push_path(&mut out, path);
    }
    if let Some(stats) = stats {
        out.push_str("# stats\n");
        writeln!(out, "# iterations {}", stats.iterations).unwrap();
        writeln!(out, "# paths {}", stats.paths).unwrap();
        writeln!(out, "# max_increase {}", number(&stats.max_increase)).unwrap();
    }
    out
}

/// Reads a plan: `round <i>` headers in order, each followed by its
/// solution paths. Round sink sets and the source ledger are rebuilt
/// from the paths.
pub fn parse_plan(text: &str) -> Result<RoundPlan, FormatError> {
    let mut rounds: Vec<Vec<PathFlow>> = Vec::new();
    for (line, tokens) in records(text) {
        match tokens[0] {
            "round" => {
                expect_len(&tokens, 2, line, "round <index>")?;
                let index = parse_id(tokens[1], line)? as usize;
                if index != rounds.len() {
                    return Err(fail(line, format!("expected round {}", rounds.len())));
                }
                rounds.push(Vec::new());
            }
            "p" => match rounds.last_mut() {
                Some(open) => open.push(parse_path(&tokens, line)?),
                None => return Err(fail(line, "path before any round header")),
            },
            other => return Err(fail(line, format!("unknown record `{other}`"))),
        }
    }
    let mut ledger = std::collections::BTreeMap::new();
    let rounds = rounds
        .into_iter()
        .map(|paths| {
            let mut sinks: Vec<VertexId> = paths.iter().map(|p| p.sink).collect();
            sinks.sort_unstable();
            sinks.dedup();
            for p in &paths {
                let used = ledger.entry(p.source).or_insert_with(|| rat(0));
                *used = &*used + &p.value;
            }
            Round {
                sinks,
                solution: UnsplittableSolution { paths },
            }
        })
        .collect();
    Ok(RoundPlan { rounds, ledger })
}

pub fn emit_plan(plan: &RoundPlan) -> String {
    let mut out = String::new();
    for (i, round) in plan.rounds.iter().enumerate() {
        writeln!(out, "round {i}").unwrap();
        for path in &round.solution.paths {
            push_path(&mut out, path);
        }
    }
    out.push_str("# stats\n");
    writeln!(out, "# rounds {}", plan.rounds.len()).unwrap();
    if let Some((index, value)) = best_round(plan) {
        writeln!(out, "# best_round {index}").unwrap();
        writeln!(out, "# best_value {}", number(&value)).unwrap();
    }
    out
}

/// Writes paths as `p` lines and leftover cycles as `c <value> <arc-id
/// ...>` lines.
pub fn emit_decomposition(dec: &Decomposition) -> String {
    let mut out = String::new();
    for path in &dec.paths {
        push_path(&mut out, path);
    }
    for cycle in &dec.cycles {
        write!(out, "c {}", number(&cycle.value)).unwrap();
        for a in &cycle.arcs {
            write!(out, " {a}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use unsplit_core::instances::gen_nonintegral;
    use unsplit_core::{rat, ratio};

    #[test]
    fn numbers_render_reduced() {
        assert_eq!(number(&rat(-12)), "-12");
        assert_eq!(number(&ratio(6, 4)), "3/2");
        assert_eq!(parse_number("3.25", 1).unwrap(), ratio(13, 4));
    }

    #[test]
    fn instances_round_trip() {
        let (inst, _) = gen_nonintegral();
        let text = emit_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(emit_instance(&back), text);
        assert_eq!(back.vertex_ids(), inst.vertex_ids());
        assert_eq!(back.arcs(), inst.arcs());
    }

    #[test]
    fn flows_round_trip_and_default_to_zero() {
        let (inst, flow) = gen_nonintegral();
        let text = emit_flow(&inst, &flow);
        let back = parse_flow(&text, &inst).unwrap();
        assert_eq!(back.values(), flow.values());
        let sparse = parse_flow("", &inst).unwrap();
        assert!(sparse.values().iter().all(|v| v == &rat(0)));
    }

    #[test]
    fn solutions_round_trip() {
        let text = "p 0 7 5 1 5 9\np 2 7 7/2 4 9 # comment\n";
        let sol = parse_solution(text).unwrap();
        assert_eq!(sol.paths.len(), 2);
        assert_eq!(sol.paths[1].value, ratio(7, 2));
        assert_eq!(sol.paths[1].arcs, vec![ArcId(4), ArcId(9)]);
        let out = emit_solution(&sol, None);
        assert_eq!(parse_solution(&out).unwrap(), sol);
    }

    #[test]
    fn plans_round_trip() {
        let text = "round 0\np 0 3 2 1 2\nround 1\np 0 4 1 1 3\np 5 4 1 6\n";
        let plan = parse_plan(text).unwrap();
        assert_eq!(plan.rounds.len(), 2);
        assert_eq!(plan.rounds[1].sinks, vec![VertexId(4)]);
        assert_eq!(plan.ledger[&VertexId(0)], rat(3));
        assert_eq!(plan.ledger[&VertexId(5)], rat(1));
        let out = emit_plan(&plan);
        let back = parse_plan(&out).unwrap();
        assert_eq!(emit_plan(&back), out);
    }

    #[test]
    fn malformed_lines_name_their_spot() {
        assert_eq!(parse_instance("v 0").unwrap_err().line, 1);
        assert_eq!(parse_instance("q 0 1").unwrap_err().line, 1);
        assert_eq!(parse_instance("v 0 1/0").unwrap_err().line, 1);
        assert_eq!(parse_solution("p 0 1 2").unwrap_err().line, 1);
        assert_eq!(parse_plan("p 0 1 2 0").unwrap_err().line, 1);
        assert_eq!(parse_plan("round 1").unwrap_err().line, 1);
        let unbalanced = parse_instance("v 0 1\nv 1 0\n").unwrap_err();
        assert_eq!(unbalanced.line, 0);
    }
}
