//! Instance generators for the two benchmark families, plus a line-oriented
//! text format for arbitrary binary instances.
//!
//! Both generators hard-code descending variable and value orders; the
//! search-effort counts of the benchmarks depend on those orders exactly.

use crate::model::{CheckPlan, Constraint, CspInstance, Domain, InvalidInstance, Value, VarId};

/// The interleaved-boards benchmark: `var_card` variables assigned in
/// descending id order, each with the domain `value_card, ..., 1` in that
/// trial order.
///
/// The odd-numbered and the even-numbered variables each encode an n-queens
/// board (distinct values, `|value gap| != |id gap| / 2` between same-parity
/// variables), and adjacent variables must differ, which forces the two
/// boards apart. The check plan of variable `i` runs the same-parity checks
/// partner-by-partner, oldest-assigned partner first, and finishes with the
/// adjacent not-equal check; the first violated check decides the conflict,
/// and putting older partners first is what makes backjumping land far.
pub fn paper_problem(var_card: u32, value_card: u32) -> CspInstance {
    let n = var_card as usize;
    let order: Vec<VarId> = (1..=var_card).rev().map(VarId).collect();
    let domain = Domain::new((1..=value_card).rev().map(Value).collect());
    let domains = vec![domain; n];
    let mut plans = Vec::with_capacity(n);
    for i in 1..=var_card {
        let mut checks = Vec::new();
        let mut partner = i + 2;
        let mut same_parity = Vec::new();
        while partner <= var_card {
            same_parity.push(partner);
            partner += 2;
        }
        for &j in same_parity.iter().rev() {
            checks.push((VarId(j), Constraint::NotEqual));
            checks.push((VarId(j), Constraint::DiagDiff { divisor: 2 }));
        }
        if i < var_card {
            checks.push((VarId(i + 1), Constraint::NotEqual));
        }
        plans.push(CheckPlan::new(checks));
    }
    CspInstance::new(order, domains, plans).expect("generated instance is structurally valid")
}

/// Plain n-queens with the same descending set-up: variables `n..1`, domains
/// `n..1`, and for each variable the not-equal and no-diagonal checks against
/// every earlier variable, oldest-assigned partner first.
pub fn queens(n: u32) -> CspInstance {
    let count = n as usize;
    let order: Vec<VarId> = (1..=n).rev().map(VarId).collect();
    let domain = Domain::new((1..=n).rev().map(Value).collect());
    let domains = vec![domain; count];
    let mut plans = Vec::with_capacity(count);
    for i in 1..=n {
        let mut checks = Vec::new();
        for j in (i + 1..=n).rev() {
            checks.push((VarId(j), Constraint::NotEqual));
            checks.push((VarId(j), Constraint::DiagDiff { divisor: 1 }));
        }
        plans.push(CheckPlan::new(checks));
    }
    CspInstance::new(order, domains, plans).expect("generated instance is structurally valid")
}

/// Errors from [`parse_instance`].
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    /// Malformed or inconsistent content at a specific line.
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    /// The text ended before describing a complete instance.
    #[error("{message}")]
    Incomplete { message: String },
    /// The assembled instance violates a structural invariant.
    #[error(transparent)]
    Invalid(#[from] InvalidInstance),
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// csp <var_count>
/// order <id> <id> ...
/// domain <var> <value> <value> ...
/// check <var> <partner> neq
/// check <var> <partner> diag <divisor>
/// ```
///
/// `#` starts a comment; blank lines are ignored. The `csp` line comes
/// first and `order` before any `check`. A variable without a `domain` line
/// has an empty domain. Checks execute in file order per variable; every
/// check partner must be assigned earlier in the order than its variable.
pub fn parse_instance(text: &str) -> Result<CspInstance, ParseError> {
    let mut var_count: Option<usize> = None;
    let mut order: Option<Vec<VarId>> = None;
    let mut ranks: Vec<usize> = Vec::new();
    let mut domains: Vec<Option<Vec<Value>>> = Vec::new();
    let mut checks: Vec<Vec<(VarId, Constraint)>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().expect("nonempty line has a first token");
        let args: Vec<&str> = tokens.collect();

        let parse_u32 = |token: &str, what: &str| -> Result<u32, ParseError> {
            token
                .parse::<u32>()
                .map_err(|_| ParseError::at(line, format!("expected {what}, got `{token}`")))
        };

        match directive {
            "csp" => {
                if var_count.is_some() {
                    return Err(ParseError::at(line, "duplicate `csp` line"));
                }
                if args.len() != 1 {
                    return Err(ParseError::at(line, "`csp` takes exactly one argument"));
                }
                let n = parse_u32(args[0], "a variable count")? as usize;
                var_count = Some(n);
                domains = vec![None; n];
                checks = vec![Vec::new(); n];
                ranks = vec![usize::MAX; n];
            }
            "order" => {
                let n = var_count.ok_or_else(|| ParseError::at(line, "`order` before `csp`"))?;
                if order.is_some() {
                    return Err(ParseError::at(line, "duplicate `order` line"));
                }
                if args.len() != n {
                    return Err(ParseError::at(
                        line,
                        format!("`order` must list all {n} variables, got {}", args.len()),
                    ));
                }
                let mut listed = Vec::with_capacity(n);
                for token in &args {
                    let id = parse_u32(token, "a variable id")?;
                    if id == 0 || id as usize > n {
                        return Err(ParseError::at(
                            line,
                            format!("variable id {id} out of range 1..={n}"),
                        ));
                    }
                    if ranks[id as usize - 1] != usize::MAX {
                        return Err(ParseError::at(
                            line,
                            format!("variable id {id} listed twice in `order`"),
                        ));
                    }
                    ranks[id as usize - 1] = listed.len();
                    listed.push(VarId(id));
                }
                order = Some(listed);
            }
            "domain" => {
                let n = var_count.ok_or_else(|| ParseError::at(line, "`domain` before `csp`"))?;
                let Some((var_token, value_tokens)) = args.split_first() else {
                    return Err(ParseError::at(line, "`domain` needs a variable id"));
                };
                let var = parse_u32(var_token, "a variable id")?;
                if var == 0 || var as usize > n {
                    return Err(ParseError::at(
                        line,
                        format!("variable id {var} out of range 1..={n}"),
                    ));
                }
                let slot = &mut domains[var as usize - 1];
                if slot.is_some() {
                    return Err(ParseError::at(
                        line,
                        format!("duplicate `domain` line for variable {var}"),
                    ));
                }
                let mut values = Vec::with_capacity(value_tokens.len());
                for token in value_tokens {
                    let v = parse_u32(token, "a positive value")?;
                    if v == 0 {
                        return Err(ParseError::at(line, "domain values must be positive"));
                    }
                    if values.contains(&Value(v)) {
                        return Err(ParseError::at(
                            line,
                            format!("duplicate value {v} in domain of variable {var}"),
                        ));
                    }
                    values.push(Value(v));
                }
                *slot = Some(values);
            }
            "check" => {
                let n = var_count.ok_or_else(|| ParseError::at(line, "`check` before `csp`"))?;
                if order.is_none() {
                    return Err(ParseError::at(line, "`check` before `order`"));
                }
                if args.len() < 3 {
                    return Err(ParseError::at(
                        line,
                        "`check` takes a variable, a partner, and a constraint",
                    ));
                }
                let var = parse_u32(args[0], "a variable id")?;
                let partner = parse_u32(args[1], "a partner id")?;
                for id in [var, partner] {
                    if id == 0 || id as usize > n {
                        return Err(ParseError::at(
                            line,
                            format!("variable id {id} out of range 1..={n}"),
                        ));
                    }
                }
                if ranks[partner as usize - 1] >= ranks[var as usize - 1] {
                    return Err(ParseError::at(
                        line,
                        format!(
                            "check on variable {var} references partner {partner}, \
                             which is not assigned earlier in the order"
                        ),
                    ));
                }
                let constraint = match (args[2], args.len()) {
                    ("neq", 3) => Constraint::NotEqual,
                    ("diag", 4) => {
                        let divisor = parse_u32(args[3], "a positive divisor")?;
                        if divisor == 0 {
                            return Err(ParseError::at(line, "divisor must be positive"));
                        }
                        Constraint::DiagDiff { divisor }
                    }
                    _ => {
                        return Err(ParseError::at(
                            line,
                            format!("unknown or malformed constraint `{}`", args[2]),
                        ))
                    }
                };
                checks[var as usize - 1].push((VarId(partner), constraint));
            }
            other => {
                return Err(ParseError::at(line, format!("unknown directive `{other}`")));
            }
        }
    }

    if var_count.is_none() {
        return Err(ParseError::Incomplete {
            message: "missing `csp` line".into(),
        });
    }
    let order = order.ok_or_else(|| ParseError::Incomplete {
        message: "missing `order` line".into(),
    })?;
    let domains = domains
        .into_iter()
        .map(|d| Domain::new(d.unwrap_or_default()))
        .collect();
    let plans = checks.into_iter().map(CheckPlan::new).collect();
    Ok(CspInstance::new(order, domains, plans)?)
}

/// Renders an instance in the format accepted by [`parse_instance`];
/// `parse_instance(&serialize_instance(x))` reproduces `x` exactly.
pub fn serialize_instance(instance: &CspInstance) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let n = instance.var_count();
    writeln!(out, "csp {n}").unwrap();
    let order: Vec<String> = instance.order().iter().map(|v| v.to_string()).collect();
    writeln!(out, "order {}", order.join(" ")).unwrap();
    for id in 1..=n {
        let var = VarId(id as u32);
        let values: Vec<String> = instance
            .domain(var)
            .trial_order()
            .iter()
            .map(|v| v.to_string())
            .collect();
        if values.is_empty() {
            writeln!(out, "domain {var}").unwrap();
        } else {
            writeln!(out, "domain {var} {}", values.join(" ")).unwrap();
        }
    }
    for id in 1..=n {
        let var = VarId(id as u32);
        for &(partner, constraint) in instance.plan(var).checks() {
            match constraint {
                Constraint::NotEqual => writeln!(out, "check {var} {partner} neq").unwrap(),
                Constraint::DiagDiff { divisor } => {
                    writeln!(out, "check {var} {partner} diag {divisor}").unwrap()
                }
            }
        }
    }
    out
}
