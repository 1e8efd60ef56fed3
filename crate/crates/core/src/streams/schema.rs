use crate::error::{Error, Result};
use crate::metric::FeatureVector;

/// One raw attribute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttrValue {
    Numeric(f64),
    /// Index into the attribute's category list.
    Nominal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal(categories.into_iter().map(Into::into).collect()),
        }
    }

    /// Width of this attribute in the encoded vector.
    pub fn width(&self) -> usize {
        match &self.kind {
            AttributeKind::Numeric => 1,
            AttributeKind::Nominal(cats) => cats.len(),
        }
    }

    pub fn category_index(&self, value: &str) -> Option<usize> {
        match &self.kind {
            AttributeKind::Numeric => None,
            AttributeKind::Nominal(cats) => cats.iter().position(|c| c == value),
        }
    }
}

/// Attribute layout and class labels of a stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamSchema {
    attributes: Vec<Attribute>,
    class_names: Vec<String>,
    encoded_dim: usize,
}

impl StreamSchema {
    pub fn new<S: Into<String>>(attributes: Vec<Attribute>, class_names: impl IntoIterator<Item = S>) -> Result<Self> {
        let class_names: Vec<String> = class_names.into_iter().map(Into::into).collect();
        if class_names.len() < 2 {
            return Err(Error::Schema(format!(
                "at least 2 classes required, got {}",
                class_names.len()
            )));
        }
        for attr in &attributes {
            if let AttributeKind::Nominal(cats) = &attr.kind {
                if cats.is_empty() {
                    return Err(Error::Schema(format!(
                        "nominal attribute {} has no categories",
                        attr.name
                    )));
                }
            }
        }
        let encoded_dim = attributes.iter().map(Attribute::width).sum();
        if encoded_dim == 0 {
            return Err(Error::Schema("encoded dimension must be at least 1".into()));
        }
        Ok(StreamSchema {
            attributes,
            class_names,
            encoded_dim,
        })
    }

    /// `n` numeric attributes named `x1..xn`, classes `0..classes`.
    pub fn numeric(n: usize, classes: usize) -> Result<Self> {
        Self::new(
            (1..=n).map(|i| Attribute::numeric(format!("x{i}"))).collect(),
            (0..classes).map(|c| c.to_string()),
        )
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn encoded_dim(&self) -> usize {
        self.encoded_dim
    }

    /// Numerics are copied; each nominal becomes a one-hot block.
    pub fn encode(&self, raw: &[AttrValue]) -> Result<FeatureVector> {
        if raw.len() != self.attributes.len() {
            return Err(Error::Schema(format!(
                "expected {} attributes, got {}",
                self.attributes.len(),
                raw.len()
            )));
        }
        let mut out = Vec::with_capacity(self.encoded_dim);
        for (attr, value) in self.attributes.iter().zip(raw) {
            match (&attr.kind, *value) {
                (AttributeKind::Numeric, AttrValue::Numeric(v)) => {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("numeric attribute"));
                    }
                    out.push(v);
                }
                (AttributeKind::Nominal(cats), AttrValue::Nominal(idx)) => {
                    if idx >= cats.len() {
                        return Err(Error::Schema(format!(
                            "unknown category {idx} for attribute {} ({} categories)",
                            attr.name,
                            cats.len()
                        )));
                    }
                    let start = out.len();
                    out.resize(start + cats.len(), 0.0);
                    out[start + idx] = 1.0;
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "attribute {} has the wrong value kind",
                        attr.name
                    )))
                }
            }
        }
        Ok(FeatureVector::new(out))
    }
}
