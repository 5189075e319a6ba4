#![allow(dead_code)]

use fractal_core::scheme::{build_tree, builtin, CellTree, Scheme, BUILTIN_NAMES};
use fractal_core::Caps;

pub fn scheme(name: &str) -> Scheme {
    builtin(name).unwrap()
}

pub fn tree(name: &str, depth: usize) -> CellTree {
    build_tree(&scheme(name), depth, &Caps::default()).unwrap()
}

pub fn all_builtins() -> impl Iterator<Item = Scheme> {
    BUILTIN_NAMES.iter().map(|n| scheme(n))
}

/// An element seen by [`parse_xml`]: its name and attributes in document order.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
}

impl Element {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Minimal well-formedness check: optional XML declaration, a single root,
/// balanced tags, quoted unique attributes and known entity references.
/// Returns every element in document order.
pub fn parse_xml(doc: &str) -> Result<Vec<Element>, String> {
    let mut p = XmlParser { s: doc.as_bytes(), i: 0, elements: Vec::new() };
    if p.s.starts_with(b"<?xml") {
        let end = p.find(b"?>").ok_or("unterminated declaration")?;
        p.i = end + 2;
    }
    p.skip_ws();
    p.element()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("trailing content at byte {}", p.i));
    }
    Ok(p.elements)
}

struct XmlParser<'a> {
    s: &'a [u8],
    i: usize,
    elements: Vec<Element>,
}

impl XmlParser<'_> {
    fn find(&self, pat: &[u8]) -> Option<usize> {
        self.s[self.i..].windows(pat.len()).position(|w| w == pat).map(|k| self.i + k)
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.i += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(format!("expected {:?} at byte {}", c as char, self.i))
        }
    }

    fn name(&mut self) -> Result<String, String> {
        let start = self.i;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || b"_-.:".contains(&c))
        {
            self.i += 1;
        }
        if start == self.i || self.s[start].is_ascii_digit() {
            return Err(format!("bad name at byte {start}"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn text_until(&mut self, stop: u8) -> Result<String, String> {
        let start = self.i;
        while let Some(c) = self.peek() {
            if c == stop {
                break;
            }
            if c == b'<' {
                return Err(format!("raw '<' at byte {}", self.i));
            }
            if c == b'&' {
                let end = self.find(b";").ok_or("unterminated entity")?;
                let ent = &self.s[self.i + 1..end];
                let known = matches!(ent, b"amp" | b"lt" | b"gt" | b"quot" | b"apos")
                    || (ent.first() == Some(&b'#') && ent.len() > 1);
                if !known {
                    return Err(format!("unknown entity at byte {}", self.i));
                }
                self.i = end;
            }
            self.i += 1;
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn element(&mut self) -> Result<(), String> {
        self.expect(b'<')?;
        let name = self.name()?;
        let mut attrs: Vec<(String, String)> = Vec::new();
        loop {
            let had_ws = self.peek().is_some_and(|c| c.is_ascii_whitespace());
            self.skip_ws();
            match self.peek() {
                Some(b'/') => {
                    self.i += 1;
                    self.expect(b'>')?;
                    self.elements.push(Element { name, attrs });
                    return Ok(());
                }
                Some(b'>') => {
                    self.i += 1;
                    break;
                }
                Some(_) if had_ws => {
                    let key = self.name()?;
                    if attrs.iter().any(|(k, _)| *k == key) {
                        return Err(format!("duplicate attribute {key}"));
                    }
                    self.skip_ws();
                    self.expect(b'=')?;
                    self.skip_ws();
                    let quote = self.peek().filter(|&q| q == b'"' || q == b'\'').ok_or("unquoted attribute")?;
                    self.i += 1;
                    let value = self.text_until(quote)?;
                    self.expect(quote)?;
                    attrs.push((key, value));
                }
                _ => return Err(format!("malformed tag {name} at byte {}", self.i)),
            }
        }
        self.elements.push(Element { name: name.clone(), attrs });
        loop {
            self.text_until(b'<')?;
            if self.s[self.i..].starts_with(b"</") {
                self.i += 2;
                let close = self.name()?;
                if close != name {
                    return Err(format!("</{close}> closes <{name}>"));
                }
                self.skip_ws();
                return self.expect(b'>');
            }
            if self.peek().is_none() {
                return Err(format!("unclosed <{name}>"));
            }
            self.element()?;
        }
    }
}
