//! Trace files: one ground term per line, optionally separated by
//! `@<pos> #<rule>` annotations (rule numbers are 1-based). Lines starting
//! with `%` are comments. A missing annotation is inferred from the first
//! one-step reduct that yields the next term.

use super::{one_step_reducts, Derivation, RewriteError};
use crate::term::{parse_term, Position, Trs};

pub fn parse_trace(trs: &Trs, text: &str) -> Result<Derivation, RewriteError> {
    let mut d: Option<Derivation> = None;
    let mut pending: Option<(Position, usize, usize)> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let err = |msg: String| RewriteError::Trace { line: line_no, msg };
        if let Some(rest) = line.strip_prefix('@') {
            if pending.is_some() || d.is_none() {
                return Err(err("annotation must follow a term".into()));
            }
            let (pos, rule) = rest
                .split_once('#')
                .ok_or_else(|| err("expected `@<pos> #<rule>`".into()))?;
            let pos: Position = pos.trim().parse().map_err(|e: crate::term::TermError| err(e.to_string()))?;
            let rule: usize = rule
                .trim()
                .parse()
                .ok()
                .filter(|&r| r >= 1)
                .ok_or_else(|| err(format!("bad rule number {:?}", rule.trim())))?;
            pending = Some((pos, rule - 1, line_no));
            continue;
        }
        let t = parse_term(line, &[]).map_err(|e| err(e.to_string()))?;
        trs.check_term(&t).map_err(|e| err(e.to_string()))?;
        match d.as_mut() {
            None => d = Some(Derivation::empty(t)),
            Some(d) => {
                match pending.take() {
                    Some((pos, rule, at)) => {
                        d.push(trs, &pos, rule).map_err(|e| RewriteError::Trace {
                            line: at,
                            msg: e.to_string(),
                        })?;
                        if d.last() != &t {
                            return Err(err(format!("step yields {}, trace says {}", d.last(), t)));
                        }
                    }
                    None => {
                        let step = one_step_reducts(trs, d.last())
                            .into_iter()
                            .find(|s| s.target == t)
                            .ok_or_else(|| err(format!("{t} is not a one-step reduct of {}", d.last())))?;
                        d.steps.push(step);
                    }
                }
            }
        }
    }
    if pending.is_some() {
        return Err(RewriteError::Trace {
            line: text.lines().count(),
            msg: "annotation without a following term".into(),
        });
    }
    d.ok_or(RewriteError::Trace {
        line: 0,
        msg: "empty trace".into(),
    })
}

pub fn write_trace(d: &Derivation) -> String {
    let mut s = format!("{}\n", d.initial);
    for step in &d.steps {
        s.push_str(&format!("@{} #{}\n{}\n", step.redex, step.rule_index + 1, step.target));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_trs;

    fn rb() -> Trs {
        parse_trs("(VAR x) (RULES f(x) -> g(c,x) g(x,x) -> h(x,x) c -> d)").unwrap()
    }

    #[test]
    fn annotated_and_inferred() {
        let text = "% figure 1\nf(f(c))\n@1 #1\nf(g(c,c))\n@1 #2\nf(h(c,c))\nf(h(c,d))\n";
        let d = parse_trace(&rb(), text).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.steps[2].redex.to_string(), "1.2");
        let again = parse_trace(&rb(), &write_trace(&d)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn bad_traces() {
        assert!(parse_trace(&rb(), "f(c)\n@1 #1\nd\n").is_err());
        assert!(parse_trace(&rb(), "f(c)\n@ #1\nf(c)\n").is_err());
        assert!(parse_trace(&rb(), "f(c)\nc\n").is_err());
        assert!(parse_trace(&rb(), "").is_err());
        assert!(parse_trace(&rb(), "f(c)\n@ #0\ng(c,c)").is_err());
        assert!(parse_trace(&rb(), "f(c)\n@ #1\n").is_err());
    }
}
