//! Method strings used by `bench`: a criterion, optionally suffixed with a
//! dictionary, e.g. `sif`, `ksif-brownian`, `fif-cosine`, `if`.

use sigforest::dictionary::DictionaryKind;
use sigforest::SplitCriterion;

use crate::commands::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    pub criterion: SplitCriterion,
    pub dictionary: Option<DictionaryKind>,
}

pub fn parse_dictionary(name: &str) -> Result<DictionaryKind, CliError> {
    match name {
        "brownian" => Ok(DictionaryKind::Brownian),
        "cosine" => Ok(DictionaryKind::Cosine),
        "wavelet" | "gaussian-wavelet" => Ok(DictionaryKind::GaussianWavelet),
        "self" => Ok(DictionaryKind::SelfDictionary),
        other => Err(CliError::usage(format!(
            "unknown dictionary `{other}` (expected brownian, cosine, wavelet or self)"
        ))),
    }
}

pub fn parse_method(spec: &str) -> Result<Method, CliError> {
    let (head, tail) = match spec.split_once('-') {
        Some((h, t)) => (h, Some(t)),
        None => (spec, None),
    };
    let criterion = match head {
        "sif" => SplitCriterion::Sif,
        "ksif" => SplitCriterion::Ksif,
        "fif" => SplitCriterion::Fif,
        "if" => SplitCriterion::If,
        other => {
            return Err(CliError::usage(format!(
                "unknown method `{other}` (expected sif, ksif[-dict], fif[-dict] or if)"
            )))
        }
    };
    let dictionary = match (criterion, tail) {
        (SplitCriterion::Sif | SplitCriterion::If, Some(t)) => {
            return Err(CliError::usage(format!(
                "method `{head}` takes no dictionary suffix, got `-{t}`"
            )))
        }
        (_, Some(t)) => Some(parse_dictionary(t)?),
        (SplitCriterion::Ksif | SplitCriterion::Fif, None) => Some(DictionaryKind::Brownian),
        (_, None) => None,
    };
    Ok(Method { name: spec.to_string(), criterion, dictionary })
}

pub fn parse_methods(list: &str) -> Result<Vec<Method>, CliError> {
    let methods: Vec<Method> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_method)
        .collect::<Result<_, _>>()?;
    if methods.is_empty() {
        return Err(CliError::usage("method list is empty".to_string()));
    }
    Ok(methods)
}
