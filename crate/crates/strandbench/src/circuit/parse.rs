//! Hand-rolled parser for the circuit language. Every error carries the
//! 1-based line and column it was detected at.

use std::collections::BTreeSet;

use super::{Circuit, Gate, GateOp, ParseError, ParseErrorKind, MAX_FANIN};

const RESERVED: [&str; 5] = ["inputs", "outputs", "AND", "OR", "NOT"];

struct Cursor<'a> {
    line: usize,
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, src: &'a str) -> Cursor<'a> {
        Cursor {
            line,
            chars: src.chars().collect(),
            pos: 0,
            _src: src,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn fail(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            kind,
        }
    }

    fn fail_at(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, want: char, what: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(ParseErrorKind::Expected(what)))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    /// An identifier: `[A-Za-z_][A-Za-z0-9_]*`. Returns it with the
    /// column it started at.
    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.column();
        let mut name = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                name.push(c);
                self.pos += 1;
            }
            _ => return Err(self.fail(ParseErrorKind::Expected("an identifier"))),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((name, start))
    }
}

/// Strips a trailing comment; `#` is not meaningful inside this grammar.
fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses circuit source. See the module docs for the grammar.
pub fn parse(src: &str) -> Result<Circuit, ParseError> {
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut defined: BTreeSet<String> = BTreeSet::new();
    let mut last_line = 0;

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = strip_comment(raw);
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line_no, content);

        if let Some(done) = &outputs {
            let _ = done;
            cur.skip_ws();
            return Err(cur.fail(ParseErrorKind::AfterOutputs));
        }

        let (head, head_col) = cur.ident()?;
        match head.as_str() {
            "inputs" => {
                if inputs.is_some() {
                    return Err(cur.fail_at(head_col, ParseErrorKind::DuplicateSection("inputs")));
                }
                if !gates.is_empty() {
                    return Err(cur.fail_at(head_col, ParseErrorKind::InputsNotFirst));
                }
                let mut names = Vec::new();
                while !cur.at_end() {
                    let (name, col) = cur.ident()?;
                    check_fresh(&name, col, &defined, &mut cur)?;
                    defined.insert(name.clone());
                    names.push(name);
                }
                if names.is_empty() {
                    return Err(cur.fail(ParseErrorKind::Expected("an input wire")));
                }
                inputs = Some(names);
            }
            "outputs" => {
                let mut names: Vec<String> = Vec::new();
                while !cur.at_end() {
                    let (name, col) = cur.ident()?;
                    if !defined.contains(&name) {
                        return Err(cur.fail_at(col, ParseErrorKind::Undefined(name)));
                    }
                    if names.contains(&name) {
                        return Err(cur.fail_at(col, ParseErrorKind::DuplicateOutput(name)));
                    }
                    names.push(name);
                }
                if names.is_empty() {
                    return Err(cur.fail(ParseErrorKind::Expected("an output wire")));
                }
                outputs = Some(names);
            }
            _ => {
                if inputs.is_none() {
                    return Err(cur.fail_at(head_col, ParseErrorKind::InputsNotFirst));
                }
                check_fresh(&head, head_col, &defined, &mut cur)?;
                let gate = parse_gate(&mut cur, head, &defined)?;
                defined.insert(gate.output.clone());
                gates.push(gate);
            }
        }
    }

    let Some(inputs) = inputs else {
        return Err(ParseError {
            line: last_line + 1,
            column: 1,
            kind: ParseErrorKind::MissingInputs,
        });
    };
    let Some(outputs) = outputs else {
        return Err(ParseError {
            line: last_line + 1,
            column: 1,
            kind: ParseErrorKind::MissingOutputs,
        });
    };
    Ok(Circuit {
        inputs,
        gates,
        outputs,
    })
}

fn check_fresh(
    name: &str,
    column: usize,
    defined: &BTreeSet<String>,
    cur: &mut Cursor<'_>,
) -> Result<(), ParseError> {
    if RESERVED.contains(&name) {
        return Err(cur.fail_at(column, ParseErrorKind::Reserved(name.to_string())));
    }
    if defined.contains(name) {
        return Err(cur.fail_at(column, ParseErrorKind::Redefined(name.to_string())));
    }
    Ok(())
}

fn parse_gate(
    cur: &mut Cursor<'_>,
    output: String,
    defined: &BTreeSet<String>,
) -> Result<Gate, ParseError> {
    cur.eat('=', "`=`")?;
    let (op_name, op_col) = cur.ident()?;
    let op = match op_name.as_str() {
        "AND" => GateOp::And,
        "OR" => GateOp::Or,
        "NOT" => GateOp::Not,
        other => return Err(cur.fail_at(op_col, ParseErrorKind::UnknownOp(other.to_string()))),
    };
    cur.eat('(', "`(`")?;
    let mut args = Vec::new();
    loop {
        let (arg, col) = cur.ident()?;
        if !defined.contains(&arg) {
            return Err(cur.fail_at(col, ParseErrorKind::Undefined(arg)));
        }
        if args.contains(&arg) {
            return Err(cur.fail_at(col, ParseErrorKind::RepeatedArg(arg)));
        }
        args.push(arg);
        cur.skip_ws();
        match cur.peek() {
            Some(',') => {
                cur.pos += 1;
            }
            _ => break,
        }
    }
    cur.eat(')', "`)`")?;
    if !cur.at_end() {
        return Err(cur.fail(ParseErrorKind::Expected("end of line")));
    }

    let ok = match op {
        GateOp::And => (2..=MAX_FANIN).contains(&args.len()),
        GateOp::Or => args.len() == 2,
        GateOp::Not => args.len() == 1,
    };
    if !ok {
        let expected = match op {
            GateOp::And => "2 to 8",
            GateOp::Or => "exactly 2",
            GateOp::Not => "exactly 1",
        };
        return Err(cur.fail_at(
            op_col,
            ParseErrorKind::Arity {
                op: op.name(),
                expected,
                got: args.len(),
            },
        ));
    }
    Ok(Gate { output, op, args })
}
