//! Line-oriented input format:
//!
//! ```text
//! # comment
//! vars x1 x2
//! poly x1 + x2^2
//! poly x1^2 + x2^2
//! point 0 0
//! ```
//!
//! Expressions use `+ - * ^ ( )` with `*` required between factors;
//! literals are integers, decimals (scientific notation accepted),
//! fractions `a/b`, and `sqrt(k)` for a positive integer k. The coefficient
//! domain is exact rational when every literal is an integer or fraction
//! and the point is rational; `sqrt`, decimals, or a complex point switch
//! the system to binary64 (complex binary64 when any point coordinate has
//! an imaginary part, written like `2.5i` or `1+0.5i` without spaces).

use singular_deflate::{Complex64, PolySystem, Polynomial, Rat, Scalar};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

/// Numeric literal kept in exact textual form until the domain is chosen.
#[derive(Debug, Clone, PartialEq)]
enum Lit {
    Int(String),
    Frac(String, String),
    Dec(String),
    Sqrt(u64),
}

impl Lit {
    fn exact(&self) -> bool {
        matches!(self, Lit::Int(_) | Lit::Frac(_, _))
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Num(Lit),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// One coordinate of the point line.
#[derive(Debug, Clone)]
struct PointLit {
    re: Lit,
    re_neg: bool,
    im: Option<(Lit, bool)>,
}

#[derive(Debug)]
struct RawSystem {
    varnames: Vec<String>,
    polys: Vec<Expr>,
    point: Option<Vec<PointLit>>,
}

/// A parsed system in one of the three coefficient domains.
#[derive(Debug, Clone)]
pub enum DomainSystem {
    Rational(PolySystem<Rat>),
    Float(PolySystem<f64>),
    Complex(PolySystem<Complex64>),
}

impl DomainSystem {
    pub fn domain_name(&self) -> &'static str {
        match self {
            DomainSystem::Rational(_) => "rational",
            DomainSystem::Float(_) => "float",
            DomainSystem::Complex(_) => "complex",
        }
    }
}

pub fn parse_system(text: &str) -> Result<DomainSystem, ParseError> {
    let raw = parse_raw(text)?;
    if raw.polys.is_empty() {
        return err(0, 0, "no polynomials given (expected at least one `poly` line)");
    }
    // choose the coefficient domain
    let mut all_exact = true;
    for e in &raw.polys {
        expr_literals(e, &mut |l| all_exact &= l.exact());
    }
    let mut complex_point = false;
    if let Some(pt) = &raw.point {
        for c in pt {
            all_exact &= c.re.exact();
            if let Some((im, _)) = &c.im {
                complex_point = true;
                let _ = im;
            }
        }
    }
    let n = raw.varnames.len();
    if complex_point {
        let polys = raw
            .polys
            .iter()
            .map(|e| eval_expr::<Complex64>(e, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sys = PolySystem::new(n, polys).with_names(raw.varnames.clone());
        if let Some(pt) = &raw.point {
            sys = sys.with_point(pt.iter().map(point_complex).collect::<Result<_, _>>()?);
        }
        Ok(DomainSystem::Complex(sys))
    } else if all_exact {
        let polys = raw
            .polys
            .iter()
            .map(|e| eval_expr::<Rat>(e, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sys = PolySystem::new(n, polys).with_names(raw.varnames.clone());
        if let Some(pt) = &raw.point {
            let coords = pt
                .iter()
                .map(|c| Ok(signed(lit_scalar::<Rat>(&c.re)?, c.re_neg)))
                .collect::<Result<Vec<_>, ParseError>>()?;
            sys = sys.with_point(coords);
        }
        Ok(DomainSystem::Rational(sys))
    } else {
        let polys = raw
            .polys
            .iter()
            .map(|e| eval_expr::<f64>(e, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sys = PolySystem::new(n, polys).with_names(raw.varnames.clone());
        if let Some(pt) = &raw.point {
            let coords = pt
                .iter()
                .map(|c| Ok(signed(lit_scalar::<f64>(&c.re)?, c.re_neg)))
                .collect::<Result<Vec<_>, ParseError>>()?;
            sys = sys.with_point(coords);
        }
        Ok(DomainSystem::Float(sys))
    }
}

fn signed<K: Scalar>(v: K, neg: bool) -> K {
    if neg {
        -v
    } else {
        v
    }
}

fn point_complex(c: &PointLit) -> Result<Complex64, ParseError> {
    let re = signed(lit_scalar::<f64>(&c.re)?, c.re_neg);
    let im = match &c.im {
        None => 0.0,
        Some((l, neg)) => signed(lit_scalar::<f64>(l)?, *neg),
    };
    Ok(Complex64::new(re, im))
}

fn expr_literals(e: &Expr, f: &mut impl FnMut(&Lit)) {
    match e {
        Expr::Num(l) => f(l),
        Expr::Var(_) => {}
        Expr::Neg(a) | Expr::Pow(a, _) => expr_literals(a, f),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            expr_literals(a, f);
            expr_literals(b, f);
        }
    }
}

/// Exact digit-by-digit integer build so arbitrarily long literals stay
/// exact in the rational domain.
fn int_scalar<K: Scalar>(digits: &str) -> K {
    let ten = K::from_int(10);
    let mut acc = K::from_int(0);
    for ch in digits.chars() {
        acc = acc * ten.clone() + K::from_int((ch as u8 - b'0') as i64);
    }
    acc
}

fn lit_scalar<K: Scalar>(l: &Lit) -> Result<K, ParseError> {
    Ok(match l {
        Lit::Int(s) => int_scalar::<K>(s),
        Lit::Frac(a, b) => int_scalar::<K>(a) / int_scalar::<K>(b),
        Lit::Dec(s) => {
            let v: f64 = s.parse().map_err(|_| ParseError {
                line: 0,
                col: 0,
                msg: format!("bad decimal literal {s}"),
            })?;
            K::from_f64_lossless(v)
        }
        Lit::Sqrt(k) => K::from_f64_lossless((*k as f64).sqrt()),
    })
}

fn eval_expr<K: Scalar>(e: &Expr, nvars: usize) -> Result<Polynomial<K>, ParseError> {
    Ok(match e {
        Expr::Num(l) => Polynomial::constant(nvars, lit_scalar::<K>(l)?),
        Expr::Var(i) => Polynomial::variable(nvars, *i),
        Expr::Neg(a) => -eval_expr::<K>(a, nvars)?,
        Expr::Add(a, b) => eval_expr::<K>(a, nvars)? + eval_expr::<K>(b, nvars)?,
        Expr::Sub(a, b) => eval_expr::<K>(a, nvars)? - eval_expr::<K>(b, nvars)?,
        Expr::Mul(a, b) => &eval_expr::<K>(a, nvars)? * &eval_expr::<K>(b, nvars)?,
        Expr::Pow(a, k) => {
            let base = eval_expr::<K>(a, nvars)?;
            let mut acc = Polynomial::constant(nvars, K::from_int(1));
            for _ in 0..*k {
                acc = &acc * &base;
            }
            acc
        }
    })
}

fn parse_raw(text: &str) -> Result<RawSystem, ParseError> {
    let mut varnames: Vec<String> = Vec::new();
    let mut var_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut polys = Vec::new();
    let mut point = None;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (trimmed, ""),
        };
        match keyword {
            "vars" => {
                if !varnames.is_empty() {
                    return err(lineno, 1, "duplicate vars line");
                }
                for name in rest.split_whitespace() {
                    if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                        return err(lineno, 1, format!("bad variable name {name}"));
                    }
                    if var_index.contains_key(name) {
                        return err(lineno, 1, format!("duplicate variable {name}"));
                    }
                    var_index.insert(name.to_string(), varnames.len());
                    varnames.push(name.to_string());
                }
                if varnames.is_empty() {
                    return err(lineno, 1, "vars line lists no variables");
                }
            }
            "poly" => {
                if varnames.is_empty() {
                    return err(lineno, 1, "poly before vars");
                }
                let mut p = ExprParser::new(rest, lineno, &var_index);
                let e = p.expr()?;
                p.expect_end()?;
                polys.push(e);
            }
            "point" => {
                if point.is_some() {
                    return err(lineno, 1, "duplicate point line");
                }
                let coords: Vec<PointLit> = rest
                    .split_whitespace()
                    .map(|tok| parse_point_component(tok, lineno))
                    .collect::<Result<_, _>>()?;
                if coords.len() != varnames.len() {
                    return err(
                        lineno,
                        1,
                        format!(
                            "point has {} coordinates for {} variables",
                            coords.len(),
                            varnames.len()
                        ),
                    );
                }
                point = Some(coords);
            }
            other => return err(lineno, 1, format!("unknown directive {other}")),
        }
    }
    Ok(RawSystem {
        varnames,
        polys,
        point,
    })
}

/// `a`, `-a`, `bi`, `-bi`, `a+bi`, `a-bi` (no spaces inside the token).
fn parse_point_component(tok: &str, lineno: usize) -> Result<PointLit, ParseError> {
    let mut chars = tok.char_indices().peekable();
    let read_signed_real = |chars: &mut std::iter::Peekable<std::str::CharIndices>| -> Result<(Lit, bool, bool), ParseError> {
        let mut neg = false;
        if let Some((_, c)) = chars.peek() {
            if *c == '-' || *c == '+' {
                neg = *c == '-';
                chars.next();
            }
        }
        let mut s = String::new();
        let mut saw_dot = false;
        let mut saw_exp = false;
        while let Some((_, c)) = chars.peek().copied() {
            if c.is_ascii_digit() {
                s.push(c);
                chars.next();
            } else if c == '.' && !saw_dot && !saw_exp {
                saw_dot = true;
                s.push(c);
                chars.next();
            } else if (c == 'e' || c == 'E') && !saw_exp && !s.is_empty() {
                saw_exp = true;
                s.push(c);
                chars.next();
                if let Some((_, sc)) = chars.peek().copied() {
                    if sc == '+' || sc == '-' {
                        s.push(sc);
                        chars.next();
                    }
                }
            } else if c == '/' && !saw_dot && !saw_exp {
                // fraction a/b
                chars.next();
                let mut den = String::new();
                while let Some((_, dc)) = chars.peek().copied() {
                    if dc.is_ascii_digit() {
                        den.push(dc);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if s.is_empty() || den.is_empty() {
                    return err(lineno, 1, format!("bad point literal {tok}"));
                }
                return Ok((Lit::Frac(s, den), neg, false));
            } else {
                break;
            }
        }
        if s.is_empty() {
            return err(lineno, 1, format!("bad point literal {tok}"));
        }
        let imag = matches!(chars.peek(), Some((_, 'i')));
        if imag {
            chars.next();
        }
        let lit = if saw_dot || saw_exp {
            Lit::Dec(s)
        } else {
            Lit::Int(s)
        };
        Ok((lit, neg, imag))
    };
    let (first, first_neg, first_imag) = read_signed_real(&mut chars)?;
    if first_imag {
        if chars.next().is_some() {
            return err(lineno, 1, format!("trailing characters in point literal {tok}"));
        }
        return Ok(PointLit {
            re: Lit::Int("0".into()),
            re_neg: false,
            im: Some((first, first_neg)),
        });
    }
    if chars.peek().is_none() {
        return Ok(PointLit {
            re: first,
            re_neg: first_neg,
            im: None,
        });
    }
    let (second, second_neg, second_imag) = read_signed_real(&mut chars)?;
    if !second_imag || chars.next().is_some() {
        return err(lineno, 1, format!("bad complex point literal {tok}"));
    }
    Ok(PointLit {
        re: first,
        re_neg: first_neg,
        im: Some((second, second_neg)),
    })
}

struct ExprParser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    vars: &'a BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Lit),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl<'a> ExprParser<'a> {
    fn new(src: &str, line: usize, vars: &'a BTreeMap<String, usize>) -> Self {
        let mut tokens = Vec::new();
        let bytes: Vec<char> = src.chars().collect();
        let mut i = 0usize;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            match c {
                ' ' | '\t' => {
                    i += 1;
                }
                '+' => {
                    tokens.push((col, Tok::Plus));
                    i += 1;
                }
                '-' => {
                    tokens.push((col, Tok::Minus));
                    i += 1;
                }
                '*' => {
                    tokens.push((col, Tok::Star));
                    i += 1;
                }
                '^' => {
                    tokens.push((col, Tok::Caret));
                    i += 1;
                }
                '(' => {
                    tokens.push((col, Tok::LParen));
                    i += 1;
                }
                ')' => {
                    tokens.push((col, Tok::RParen));
                    i += 1;
                }
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    // decimal part
                    let mut is_dec = false;
                    if i < bytes.len() && bytes[i] == '.' {
                        is_dec = true;
                        i += 1;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    // exponent part
                    if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                            j += 1;
                        }
                        if j < bytes.len() && bytes[j].is_ascii_digit() {
                            is_dec = true;
                            i = j;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let text: String = bytes[start..i].iter().collect();
                    if is_dec {
                        tokens.push((col, Tok::Num(Lit::Dec(text))));
                    } else if i < bytes.len() && bytes[i] == '/' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                        i += 1;
                        let dstart = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        let den: String = bytes[dstart..i].iter().collect();
                        tokens.push((col, Tok::Num(Lit::Frac(text, den))));
                    } else {
                        tokens.push((col, Tok::Num(Lit::Int(text))));
                    }
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    let name: String = bytes[start..i].iter().collect();
                    tokens.push((col, Tok::Name(name)));
                }
                other => {
                    tokens.push((col, Tok::Name(format!("\u{0}bad{other}"))));
                    i += 1;
                }
            }
        }
        ExprParser {
            tokens,
            pos: 0,
            line,
            vars,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map_or(1, |(c, _)| *c)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            err(self.line, self.col(), "unexpected trailing tokens")
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            match self.bump() {
                Some(Tok::Num(Lit::Int(s))) => {
                    let k: u32 = s.parse().map_err(|_| ParseError {
                        line: self.line,
                        col: self.col(),
                        msg: format!("bad exponent {s}"),
                    })?;
                    return Ok(Expr::Pow(Box::new(base), k));
                }
                _ => return err(self.line, self.col(), "expected integer exponent after ^"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(l)) => Ok(Expr::Num(l)),
            Some(Tok::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => err(self.line, col, "missing closing parenthesis"),
                }
            }
            Some(Tok::Name(name)) if name == "sqrt" => match (self.bump(), self.bump(), self.bump()) {
                (Some(Tok::LParen), Some(Tok::Num(Lit::Int(s))), Some(Tok::RParen)) => {
                    let k: u64 = s.parse().map_err(|_| ParseError {
                        line: self.line,
                        col,
                        msg: format!("bad sqrt argument {s}"),
                    })?;
                    if k == 0 {
                        return err(self.line, col, "sqrt argument must be positive");
                    }
                    Ok(Expr::Num(Lit::Sqrt(k)))
                }
                _ => err(self.line, col, "expected sqrt(<positive integer>)"),
            },
            Some(Tok::Name(name)) => match self.vars.get(&name) {
                Some(&i) => Ok(Expr::Var(i)),
                None => err(self.line, col, format!("unknown variable {name}")),
            },
            _ => err(self.line, col, "expected a factor"),
        }
    }
}
