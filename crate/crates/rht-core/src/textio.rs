//! Line-based text formats: `.cdga` presentations, `.galg` finite
//! algebra tables, and `.cert` certificate lists.
//!
//! All three formats are UTF-8 and line-oriented; `#` starts a comment
//! (outside quoted strings) and blank lines are ignored.
//!
//! ```text
//! cdga NAME            |  galg NAME              |  cert NAME
//! gen IDENT DEG [C|N]  |  dim N                  |  zero-product G1 G2 ref "…"
//! d IDENT = POLY       |  basis IDENT DEG        |  phi-zero G ref "…"
//! relation POLY        |  mul B1 B2 = LINCOMB    |  exact-monomial MONO ref "…"
//!                      |                         |  betti-zero D ref "…"
//! ```
//!
//! `POLY` is a ℚ-linear combination of `*`-products of generator powers
//! (`3/2*x^2*y - z`, or `0`); `LINCOMB` is the linear special case over
//! basis names. Writing a power that vanishes for degree reasons (the
//! square of an odd generator) is rejected rather than silently read as
//! zero — in an input file that is always a mistake.
//!
//! `gen` lines may carry a `C`/`N` annotation marking the splitting of a
//! minimal model's generators into closed classes and the layer added to
//! kill products. Either every generator is annotated or none is. A fully
//! annotated file together with a `.galg` table assembles into a
//! [`SullivanModel`] via [`assemble_model`]: annotated `C` generators map
//! to the same-named basis classes, and `N` generators come in as opaque
//! (their images are not part of the interchange format, so every
//! statement about them must arrive through certificates).

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cdga::{Cdga, CdgaError};
use crate::finite::{FiniteAlgebraError, FiniteGradedAlgebra, TableSpec};
use crate::formality::CertificateSet;
use crate::graded::{make_context, AlgebraContext, AlgebraError, Element};
use crate::model::{ModelError, PhiValue, SullivanModel, Target, TargetElement};
use crate::scalar::{parse_scalar, Scalar};

#[derive(Debug, Error)]
pub enum TextIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Finite(#[from] FiniteAlgebraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn perr(line: usize, message: impl Into<String>) -> TextIoError {
    TextIoError::Parse { line, message: message.into() }
}

/// A parsed `.cdga` file: the validated algebra plus the `C`/`N`
/// annotations when the file carried them (index-aligned with the
/// context's generators).
#[derive(Debug)]
pub struct ParsedCdga {
    pub cdga: Cdga,
    pub c_flags: Option<Vec<bool>>,
}

/// Strips a `#` comment, ignoring `#` inside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (pos, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..pos],
            _ => {}
        }
    }
    line
}

/// Numbered, comment-stripped, nonblank lines.
fn significant_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum PolyToken {
    Ident(String),
    Number(Scalar),
    Star,
    Caret,
    Plus,
    Minus,
}

fn tokenize_poly(text: &str, line: usize) -> Result<Vec<PolyToken>, TextIoError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '*' => {
                tokens.push(PolyToken::Star);
                i += 1;
            }
            '^' => {
                tokens.push(PolyToken::Caret);
                i += 1;
            }
            '+' => {
                tokens.push(PolyToken::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(PolyToken::Minus);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                let mut seen_slash = false;
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || (chars[i] == '/' && !seen_slash))
                {
                    if chars[i] == '/' {
                        seen_slash = true;
                    }
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                let value = parse_scalar(&tok)
                    .ok_or_else(|| perr(line, format!("invalid number `{tok}`")))?;
                tokens.push(PolyToken::Number(value));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(PolyToken::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(perr(line, format!("unexpected character `{c}` in polynomial"))),
        }
    }
    Ok(tokens)
}

/// Parses a `POLY`: sign-separated terms, each a `*`-product of numbers
/// and generator powers. `0` denotes the zero element.
pub fn parse_poly(
    ctx: &AlgebraContext,
    text: &str,
    line: usize,
) -> Result<Element, TextIoError> {
    let tokens = tokenize_poly(text, line)?;
    if tokens.is_empty() {
        return Err(perr(line, "empty polynomial"));
    }
    let mut result = Element::zero(ctx);
    let mut pos = 0;
    let mut first = true;
    while pos < tokens.len() {
        let mut sign = Scalar::one();
        loop {
            match tokens.get(pos) {
                Some(PolyToken::Plus) => {
                    if first && pos == 0 {
                        return Err(perr(line, "polynomial cannot start with `+`"));
                    }
                    pos += 1;
                }
                Some(PolyToken::Minus) => {
                    sign = -sign;
                    pos += 1;
                }
                _ => break,
            }
        }
        let (term, next) = parse_term(ctx, &tokens, pos, line)?;
        result = result.add(&term.scale(&sign)).expect("same context");
        pos = next;
        first = false;
        match tokens.get(pos) {
            None | Some(PolyToken::Plus) | Some(PolyToken::Minus) => {}
            Some(other) => {
                return Err(perr(line, format!("expected `+` or `-`, found {other:?}")));
            }
        }
    }
    Ok(result)
}

/// One term: `NUM`, `NUM*factors`, or `factors`; factors are
/// `IDENT[^EXP]` joined by `*`. Returns the term and the next position.
fn parse_term(
    ctx: &AlgebraContext,
    tokens: &[PolyToken],
    mut pos: usize,
    line: usize,
) -> Result<(Element, usize), TextIoError> {
    let mut coeff = Scalar::one();
    let mut element = Element::one(ctx);
    let mut any = false;
    loop {
        match tokens.get(pos) {
            Some(PolyToken::Number(n)) => {
                coeff *= n.clone();
                pos += 1;
                any = true;
            }
            Some(PolyToken::Ident(name)) => {
                let idx = ctx
                    .index_of(name)
                    .ok_or_else(|| perr(line, format!("unknown generator `{name}`")))?;
                let mut exp = 1u32;
                if let Some(PolyToken::Caret) = tokens.get(pos + 1) {
                    match tokens.get(pos + 2) {
                        Some(PolyToken::Number(n)) if n.is_integer() && *n > Scalar::zero() => {
                            exp = n
                                .to_integer()
                                .try_into()
                                .map_err(|_| perr(line, "exponent out of range"))?;
                            pos += 2;
                        }
                        _ => return Err(perr(line, "`^` must be followed by a positive integer")),
                    }
                }
                if ctx.degree_of(idx) % 2 == 1 && exp > 1 {
                    return Err(perr(
                        line,
                        format!(
                            "`{name}^{exp}` is zero: `{name}` has odd degree; write 0 explicitly"
                        ),
                    ));
                }
                let g = Element::generator(ctx, idx);
                for _ in 0..exp {
                    element = element.mul(&g).expect("same context");
                    if element.is_zero() {
                        return Err(perr(
                            line,
                            format!(
                                "the product vanishes: `{name}` has odd degree and repeats; \
                                 write 0 explicitly"
                            ),
                        ));
                    }
                }
                pos += 1;
                any = true;
            }
            Some(PolyToken::Star) if any => {
                pos += 1;
                continue;
            }
            _ if any => break,
            other => {
                return Err(perr(line, format!("expected a term, found {other:?}")));
            }
        }
        // `*` continues the term; anything else ends it.
        match tokens.get(pos) {
            Some(PolyToken::Star) => pos += 1,
            _ => break,
        }
    }
    Ok((element.scale(&coeff), pos))
}

/// Parses a `.cdga` file. All algebra validators run before returning:
/// differentials must raise degree by one, square to zero (into the
/// ideal, when relations are present), and the ideal must be closed
/// under `d`.
pub fn parse_cdga(text: &str) -> Result<ParsedCdga, TextIoError> {
    let lines = significant_lines(text);
    if lines.is_empty() {
        return Err(perr(0, "empty file"));
    }
    let (first_no, first) = lines[0];
    let mut header = first.split_whitespace();
    if header.next() != Some("cdga") {
        return Err(perr(first_no, "expected `cdga NAME` header"));
    }
    let name = header
        .next()
        .ok_or_else(|| perr(first_no, "missing algebra name"))?
        .to_string();
    if header.next().is_some() {
        return Err(perr(first_no, "trailing tokens after algebra name"));
    }

    // First pass: generator declarations, in order.
    let mut decls: Vec<(String, usize)> = Vec::new();
    let mut flags: Vec<Option<bool>> = Vec::new();
    for &(no, l) in &lines[1..] {
        let mut words = l.split_whitespace();
        if words.next() != Some("gen") {
            continue;
        }
        let gname = words.next().ok_or_else(|| perr(no, "missing generator name"))?;
        let degree: usize = words
            .next()
            .ok_or_else(|| perr(no, "missing generator degree"))?
            .parse()
            .map_err(|_| perr(no, "generator degree must be a nonnegative integer"))?;
        if degree == 0 {
            return Err(perr(no, "generator degree must be positive (the unit is implicit)"));
        }
        let flag = match words.next() {
            None => None,
            Some("C") => Some(true),
            Some("N") => Some(false),
            Some(other) => {
                return Err(perr(no, format!("expected `C` or `N` annotation, found `{other}`")))
            }
        };
        if words.next().is_some() {
            return Err(perr(no, "trailing tokens after generator declaration"));
        }
        if decls.iter().any(|(n, _)| n == gname) {
            return Err(perr(no, format!("duplicate generator `{gname}`")));
        }
        decls.push((gname.to_string(), degree));
        flags.push(flag);
    }
    let annotated = flags.iter().filter(|f| f.is_some()).count();
    let c_flags = if annotated == 0 {
        None
    } else if annotated == flags.len() {
        Some(flags.iter().map(|f| f.unwrap()).collect::<Vec<bool>>())
    } else {
        return Err(perr(
            first_no,
            "either every generator carries a C/N annotation or none does",
        ));
    };
    let ctx = make_context(decls.clone()).map_err(TextIoError::Algebra)?;

    // Second pass: differentials and relations against the full context.
    let mut diffs: Vec<Option<Element>> = vec![None; ctx.len()];
    let mut relations: Vec<Element> = Vec::new();
    for &(no, l) in &lines[1..] {
        let mut words = l.split_whitespace();
        match words.next() {
            Some("gen") | None => {}
            Some("d") => {
                let gname = words.next().ok_or_else(|| perr(no, "missing generator after `d`"))?;
                let idx = ctx
                    .index_of(gname)
                    .ok_or_else(|| perr(no, format!("unknown generator `{gname}`")))?;
                if words.next() != Some("=") {
                    return Err(perr(no, "expected `=` after the generator name"));
                }
                let rest = l.splitn(2, '=').nth(1).unwrap_or("");
                if diffs[idx].is_some() {
                    return Err(perr(no, format!("duplicate differential for `{gname}`")));
                }
                diffs[idx] = Some(parse_poly(&ctx, rest, no)?);
            }
            Some("relation") => {
                let rest = l.strip_prefix("relation").unwrap_or("");
                relations.push(parse_poly(&ctx, rest, no)?);
            }
            Some(other) => {
                return Err(perr(no, format!("unknown directive `{other}`")));
            }
        }
    }
    let diffs: Vec<Element> =
        diffs.into_iter().map(|d| d.unwrap_or_else(|| Element::zero(&ctx))).collect();
    let cdga = Cdga::with_relations(name, ctx, diffs, relations)?;
    Ok(ParsedCdga { cdga, c_flags })
}

/// Renders a CDGA in the `.cdga` format, with optional `C`/`N`
/// annotations. Inverse to [`parse_cdga`] up to whitespace.
pub fn emit_cdga(cdga: &Cdga, c_flags: Option<&[bool]>) -> String {
    let ctx = cdga.context();
    let mut out = format!("cdga {}\n", cdga.name());
    for i in 0..ctx.len() {
        let g = ctx.generator(i);
        match c_flags {
            Some(flags) => {
                let mark = if flags[i] { "C" } else { "N" };
                out.push_str(&format!("gen {} {} {}\n", g.name, g.degree, mark));
            }
            None => out.push_str(&format!("gen {} {}\n", g.name, g.degree)),
        }
    }
    for i in 0..ctx.len() {
        let d = cdga.differential_of(i);
        if !d.is_zero() {
            out.push_str(&format!("d {} = {}\n", ctx.generator(i).name, d.render()));
        }
    }
    for r in cdga.relations() {
        out.push_str(&format!("relation {}\n", r.render()));
    }
    out
}

/// Parses a `.galg` file into a finite graded algebra. The table
/// validators (grading, unit, duality bookkeeping, associativity repair)
/// run before returning.
pub fn parse_galg(text: &str) -> Result<FiniteGradedAlgebra, TextIoError> {
    let lines = significant_lines(text);
    if lines.is_empty() {
        return Err(perr(0, "empty file"));
    }
    let (first_no, first) = lines[0];
    let mut header = first.split_whitespace();
    if header.next() != Some("galg") {
        return Err(perr(first_no, "expected `galg NAME` header"));
    }
    let name = header
        .next()
        .ok_or_else(|| perr(first_no, "missing algebra name"))?
        .to_string();

    let mut top_degree: Option<usize> = None;
    let mut basis: Vec<(String, usize)> = Vec::new();
    let mut products: Vec<(String, String, Vec<(String, Scalar)>)> = Vec::new();
    for &(no, l) in &lines[1..] {
        let mut words = l.split_whitespace();
        match words.next() {
            Some("dim") => {
                let n: usize = words
                    .next()
                    .ok_or_else(|| perr(no, "missing dimension"))?
                    .parse()
                    .map_err(|_| perr(no, "dimension must be a nonnegative integer"))?;
                if top_degree.replace(n).is_some() {
                    return Err(perr(no, "duplicate `dim` line"));
                }
            }
            Some("basis") => {
                let bname =
                    words.next().ok_or_else(|| perr(no, "missing basis element name"))?;
                let degree: usize = words
                    .next()
                    .ok_or_else(|| perr(no, "missing basis element degree"))?
                    .parse()
                    .map_err(|_| perr(no, "degree must be a nonnegative integer"))?;
                basis.push((bname.to_string(), degree));
            }
            Some("mul") => {
                let a = words.next().ok_or_else(|| perr(no, "missing left factor"))?;
                let b = words.next().ok_or_else(|| perr(no, "missing right factor"))?;
                if words.next() != Some("=") {
                    return Err(perr(no, "expected `=` after the factors"));
                }
                let rest = l.splitn(2, '=').nth(1).unwrap_or("");
                products.push((a.to_string(), b.to_string(), parse_lincomb(rest, no)?));
            }
            Some(other) => return Err(perr(no, format!("unknown directive `{other}`"))),
            None => {}
        }
    }
    let top_degree = top_degree.ok_or_else(|| perr(first_no, "missing `dim` line"))?;
    Ok(FiniteGradedAlgebra::from_table(TableSpec { name, top_degree, basis, products })?)
}

/// `LINCOMB`: sign-separated `[NUM*]IDENT` terms, or `0`.
fn parse_lincomb(text: &str, line: usize) -> Result<Vec<(String, Scalar)>, TextIoError> {
    let tokens = tokenize_poly(text, line)?;
    if tokens == [PolyToken::Number(Scalar::zero())] {
        return Ok(Vec::new());
    }
    let mut out: Vec<(String, Scalar)> = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let mut sign = Scalar::one();
        loop {
            match tokens.get(pos) {
                Some(PolyToken::Minus) => {
                    sign = -sign;
                    pos += 1;
                }
                Some(PolyToken::Plus) if pos > 0 => pos += 1,
                _ => break,
            }
        }
        let mut coeff = sign;
        if let Some(PolyToken::Number(n)) = tokens.get(pos) {
            coeff *= n.clone();
            pos += 1;
            if let Some(PolyToken::Star) = tokens.get(pos) {
                pos += 1;
            }
        }
        match tokens.get(pos) {
            Some(PolyToken::Ident(name)) => {
                out.push((name.clone(), coeff));
                pos += 1;
            }
            other => return Err(perr(line, format!("expected a basis name, found {other:?}"))),
        }
    }
    Ok(out)
}

/// Renders a finite algebra in the `.galg` format: the basis in index
/// order, then every pinned or repaired table entry (zeros included —
/// an explicit zero is data, an omitted product is merely unspecified).
pub fn emit_galg(f: &FiniteGradedAlgebra) -> String {
    let mut out = format!("galg {}\ndim {}\n", f.name(), f.top_degree());
    for b in f.basis() {
        out.push_str(&format!("basis {} {}\n", b.name, b.degree));
    }
    for (a, b, value, _) in f.entries() {
        let shown = if value.is_empty() { "0".to_string() } else { f.render_coords(value) };
        out.push_str(&format!(
            "mul {} {} = {}\n",
            f.basis()[a].name,
            f.basis()[b].name,
            shown
        ));
    }
    out
}

/// Parses a `.cert` file into a certificate set. Facts reference
/// generators by name; resolution against a model happens when the set
/// is used, not here.
pub fn parse_cert(text: &str) -> Result<CertificateSet, TextIoError> {
    let lines = significant_lines(text);
    if lines.is_empty() {
        return Err(perr(0, "empty file"));
    }
    let (first_no, first) = lines[0];
    let mut header = first.split_whitespace();
    if header.next() != Some("cert") {
        return Err(perr(first_no, "expected `cert NAME` header"));
    }
    let name = header
        .next()
        .ok_or_else(|| perr(first_no, "missing certificate set name"))?
        .to_string();
    let mut certs = CertificateSet::new(name);
    for &(no, l) in &lines[1..] {
        let (head, provenance) = split_ref(l, no)?;
        let mut words = head.split_whitespace();
        match words.next() {
            Some("zero-product") => {
                let a = words.next().ok_or_else(|| perr(no, "missing first generator"))?;
                let b = words.next().ok_or_else(|| perr(no, "missing second generator"))?;
                certs.add_zero_product(a, b, provenance);
            }
            Some("phi-zero") => {
                let g = words.next().ok_or_else(|| perr(no, "missing generator"))?;
                certs.add_phi_zero(g, provenance);
            }
            Some("exact-monomial") => {
                let m = words.next().ok_or_else(|| perr(no, "missing monomial"))?;
                certs.add_exact_monomial(m, provenance);
            }
            Some("betti-zero") => {
                let d: usize = words
                    .next()
                    .ok_or_else(|| perr(no, "missing degree"))?
                    .parse()
                    .map_err(|_| perr(no, "degree must be a nonnegative integer"))?;
                certs.add_betti_zero(d, provenance);
            }
            Some(other) => return Err(perr(no, format!("unknown fact kind `{other}`"))),
            None => {}
        }
    }
    Ok(certs)
}

/// Splits `… ref "…"` into the part before `ref` and the quoted string.
fn split_ref(line: &str, no: usize) -> Result<(&str, String), TextIoError> {
    let marker = line
        .find(" ref ")
        .ok_or_else(|| perr(no, "missing `ref \"…\"` provenance"))?;
    let head = &line[..marker];
    let tail = line[marker + 5..].trim();
    let inner = tail
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| perr(no, "provenance must be a double-quoted string"))?;
    if inner.is_empty() {
        return Err(perr(no, "provenance must not be empty"));
    }
    if inner.contains('"') {
        return Err(perr(no, "provenance must not contain embedded quotes"));
    }
    Ok((head, inner.to_string()))
}

/// Renders a certificate set in the `.cert` format, grouped by family.
/// Inverse to [`parse_cert`] up to whitespace.
pub fn emit_cert(certs: &CertificateSet) -> String {
    let mut out = format!("cert {}\n", certs.name);
    for f in &certs.zero_products {
        debug_assert!(!f.provenance.contains('"'));
        out.push_str(&format!(
            "zero-product {} {} ref \"{}\"\n",
            f.left, f.right, f.provenance
        ));
    }
    for f in &certs.phi_zeros {
        out.push_str(&format!("phi-zero {} ref \"{}\"\n", f.generator, f.provenance));
    }
    for f in &certs.exact_monomials {
        out.push_str(&format!("exact-monomial {} ref \"{}\"\n", f.monomial, f.provenance));
    }
    for f in &certs.betti_zeros {
        out.push_str(&format!("betti-zero {} ref \"{}\"\n", f.degree, f.provenance));
    }
    out
}

/// Assembles a Sullivan model from an annotated `.cdga` presentation and
/// a finite cohomology table: `C` generators map to the same-named basis
/// classes of the table, `N` generators are opaque. The model is built
/// through the highest declared generator degree.
pub fn assemble_model(
    parsed: &ParsedCdga,
    target: Arc<FiniteGradedAlgebra>,
) -> Result<SullivanModel, TextIoError> {
    let flags = parsed.c_flags.as_ref().ok_or_else(|| {
        perr(0, "model assembly needs C/N annotations on every generator")
    })?;
    let ctx = parsed.cdga.context();
    let mut phi = Vec::with_capacity(ctx.len());
    for i in 0..ctx.len() {
        let g = ctx.generator(i);
        if flags[i] {
            let fi = target.index_of(&g.name).ok_or_else(|| {
                perr(0, format!("C generator `{}` has no same-named cohomology class", g.name))
            })?;
            phi.push(PhiValue::Element(TargetElement::Finite {
                degree: g.degree,
                coords: vec![(fi, Scalar::one())],
            }));
        } else {
            phi.push(PhiValue::Opaque(format!(
                "imported generator `{}`: its image is not part of the interchange format; \
                 statements about it must come from certificates",
                g.name
            )));
        }
    }
    let built_through =
        (0..ctx.len()).map(|i| ctx.generator(i).degree).max().unwrap_or(0);
    Ok(SullivanModel::from_parts(
        parsed.cdga.clone(),
        Target::Finite(target),
        phi,
        flags.clone(),
        built_through,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::heisenberg;
    use crate::formality::CertFamily;
    use crate::joyce;

    #[test]
    fn heisenberg_roundtrips_and_has_nilmanifold_betti() {
        let text = emit_cdga(&heisenberg(), None);
        let parsed = parse_cdga(&text).unwrap();
        assert_eq!(emit_cdga(&parsed.cdga, None), text);
        let betti: Vec<usize> =
            (0..=3).map(|d| parsed.cdga.cohomology(d).unwrap().dim).collect();
        assert_eq!(betti, vec![1, 2, 2, 1]);
    }

    #[test]
    fn poly_parser_handles_signs_coefficients_and_powers() {
        let ctx = make_context(vec![("x", 2), ("y", 3), ("z", 5)]).unwrap();
        let e = parse_poly(&ctx, "3/2*x^2*y - z + x*y", 1).unwrap();
        let roundtrip = parse_poly(&ctx, &e.render(), 1).unwrap();
        assert_eq!(e, roundtrip);
        assert_eq!(parse_poly(&ctx, "x^2*y", 1).unwrap().degree(), Some(7));

        assert!(parse_poly(&ctx, "0", 1).unwrap().is_zero());
        assert!(parse_poly(&ctx, "w", 1).is_err());
        assert!(parse_poly(&ctx, "x +", 1).is_err());
        assert!(parse_poly(&ctx, "x^0", 1).is_err());
    }

    #[test]
    fn odd_squares_are_rejected_not_read_as_zero() {
        let text = "cdga bad\ngen x 3\ngen z 5\nd z = x*x\n";
        let err = parse_cdga(text).unwrap_err();
        assert!(matches!(err, TextIoError::Parse { line: 4, .. }), "{err}");
        assert!(err.to_string().contains("odd degree"));
    }

    #[test]
    fn degree_violations_surface_as_validation_errors() {
        // d z = x^2 is fine for |z| = 3; for |z| = 4 the degrees mismatch.
        let good = "cdga ok\ngen x 2\ngen z 3\nd z = x^2\n";
        assert!(parse_cdga(good).is_ok());
        let bad = "cdga bad\ngen x 2\ngen z 4\nd z = x^2\n";
        assert!(matches!(parse_cdga(bad).unwrap_err(), TextIoError::Cdga(_)));
    }

    #[test]
    fn galg_roundtrips_through_parse_and_emit() {
        let text = emit_galg(joyce::joyce_target());
        let parsed = parse_galg(&text).unwrap();
        assert_eq!(emit_galg(&parsed), text);
        assert_eq!(parsed.betti_vector(), joyce::joyce_target().betti_vector());
        // The emitted table carries the repaired entries as pinned data,
        // so nothing is left for the solver to fill in.
        assert!(parsed.repairs().is_empty());
    }

    #[test]
    fn cert_roundtrips_through_parse_and_emit() {
        let text = emit_cert(&joyce::joyce_certificates());
        let parsed = parse_cert(&text).unwrap();
        assert_eq!(emit_cert(&parsed), text);
        assert_eq!(parsed.len(), 241);
        assert_eq!(parsed.family_len(CertFamily::ExactMonomial), 108);
    }

    #[test]
    fn annotated_model_file_assembles_with_opaque_n_generators() {
        let m = joyce::joyce_model();
        let flags: Vec<bool> = (0..m.cdga().context().len()).map(|i| m.is_c(i)).collect();
        let text = emit_cdga(m.cdga(), Some(&flags));
        let parsed = parse_cdga(&text).unwrap();
        assert_eq!(parsed.c_flags.as_deref(), Some(flags.as_slice()));

        let target = Arc::new(parse_galg(&emit_galg(joyce::joyce_target())).unwrap());
        let assembled = assemble_model(&parsed, target).unwrap();
        assert_eq!(assembled.built_through(), 3);
        assert_eq!(assembled.c_generators_of_degree(3).len(), 43);
        assert_eq!(assembled.n_generators_of_degree(3).len(), 75);
        assert!(matches!(assembled.phi(60), PhiValue::Opaque(_)));
    }

    #[test]
    fn mixed_annotations_are_rejected() {
        let text = "cdga bad\ngen x 2 C\ngen y 3\n";
        assert!(parse_cdga(text).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored_everywhere() {
        let text = "# header comment\ncdga c # trailing\n\ngen x 2\n# gen y 9\nd x = 0\n";
        let parsed = parse_cdga(text).unwrap();
        assert_eq!(parsed.cdga.context().len(), 1);
    }
}
