//! Personality representations: trait vectors, MBTI types, BFI-10 scoring
//! and dominant-trait classification.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors from personality type construction and scoring.
#[derive(Debug, Error, PartialEq)]
pub enum PersonalityError {
    #[error("{model} expects {expected} trait scores, got {got}")]
    WrongDimensionCount {
        model: PersonalityModelKind,
        expected: usize,
        got: usize,
    },
    #[error("trait score at position {index} is {value}, must lie in [0, 1]")]
    ScoreOutOfRange { index: usize, value: f64 },
    #[error("{0} is not a trait model")]
    NotATraitModel(PersonalityModelKind),
    #[error("questionnaire expects 10 answers, got {0}")]
    AnswerCount(usize),
    #[error("answer to item {item} is {value}, must lie in 1..=5")]
    AnswerOutOfRange { item: usize, value: u8 },
}

/// Error from parsing a four-letter MBTI type string.
#[derive(Debug, Error, PartialEq)]
pub enum MbtiParseError {
    #[error("MBTI type must be exactly 4 letters, got {0} characters")]
    BadLength(usize),
    #[error("invalid letter '{found}' at position {position}, expected one of {expected}")]
    BadLetter {
        position: usize,
        found: char,
        expected: &'static str,
    },
}

/// The personality model a recommender is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PersonalityModelKind {
    /// Five-factor trait model, dimensions ordered O, C, E, A, N.
    Big5,
    /// Three-dimension trait model, ordered P, E, N.
    Eysenck,
    /// Six-dimension trait model adding Honesty-Humility, ordered H, E, X, A, C, O.
    Hexaco,
    /// Sixteen discrete four-letter types.
    Mbti,
    /// Trait similarity combined with MBTI type matching.
    Hybrid,
}

impl PersonalityModelKind {
    pub const ALL: [PersonalityModelKind; 5] = [
        PersonalityModelKind::Big5,
        PersonalityModelKind::Eysenck,
        PersonalityModelKind::Hexaco,
        PersonalityModelKind::Mbti,
        PersonalityModelKind::Hybrid,
    ];

    /// Dimension labels in canonical order, or `None` for type-based kinds.
    pub fn dimension_labels(self) -> Option<&'static [&'static str]> {
        match self {
            PersonalityModelKind::Big5 => Some(&[
                "Openness",
                "Conscientiousness",
                "Extraversion",
                "Agreeableness",
                "Neuroticism",
            ]),
            PersonalityModelKind::Eysenck => {
                Some(&["Psychoticism", "Extraversion", "Neuroticism"])
            }
            PersonalityModelKind::Hexaco => Some(&[
                "Honesty-Humility",
                "Emotionality",
                "Extraversion",
                "Agreeableness",
                "Conscientiousness",
                "Openness",
            ]),
            PersonalityModelKind::Mbti | PersonalityModelKind::Hybrid => None,
        }
    }

    /// Number of trait dimensions, or `None` for type-based kinds.
    pub fn dimension_count(self) -> Option<usize> {
        self.dimension_labels().map(|labels| labels.len())
    }

    /// True for the models that carry a continuous trait vector.
    pub fn is_trait_model(self) -> bool {
        self.dimension_labels().is_some()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PersonalityModelKind::Big5 => "big5",
            PersonalityModelKind::Eysenck => "eysenck",
            PersonalityModelKind::Hexaco => "hexaco",
            PersonalityModelKind::Mbti => "mbti",
            PersonalityModelKind::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for PersonalityModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PersonalityModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "big5" => Ok(PersonalityModelKind::Big5),
            "eysenck" => Ok(PersonalityModelKind::Eysenck),
            "hexaco" => Ok(PersonalityModelKind::Hexaco),
            "mbti" => Ok(PersonalityModelKind::Mbti),
            "hybrid" => Ok(PersonalityModelKind::Hybrid),
            other => Err(format!(
                "unknown personality model '{other}' (expected big5, eysenck, hexaco, mbti or hybrid)"
            )),
        }
    }
}

/// Normalized trait intensities for one user under one trait model.
///
/// Scores are dimensionless values in `[0, 1]`, one per dimension, in the
/// model's canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraitVector {
    model: PersonalityModelKind,
    scores: Vec<f64>,
}

impl TraitVector {
    pub fn new(
        model: PersonalityModelKind,
        scores: Vec<f64>,
    ) -> Result<TraitVector, PersonalityError> {
        let expected = model
            .dimension_count()
            .ok_or(PersonalityError::NotATraitModel(model))?;
        if scores.len() != expected {
            return Err(PersonalityError::WrongDimensionCount {
                model,
                expected,
                got: scores.len(),
            });
        }
        for (index, &value) in scores.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(PersonalityError::ScoreOutOfRange { index, value });
            }
        }
        Ok(TraitVector { model, scores })
    }

    pub fn model(&self) -> PersonalityModelKind {
        self.model
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

/// One of the 16 four-letter personality types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MbtiType {
    attitude: Attitude,
    perceiving: Perceiving,
    judging: Judging,
    lifestyle: Lifestyle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attitude {
    Extraverted,
    Introverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perceiving {
    Sensing,
    Intuitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Judging {
    Thinking,
    Feeling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lifestyle {
    Judging,
    Perceiving,
}

impl MbtiType {
    pub fn new(
        attitude: Attitude,
        perceiving: Perceiving,
        judging: Judging,
        lifestyle: Lifestyle,
    ) -> MbtiType {
        MbtiType {
            attitude,
            perceiving,
            judging,
            lifestyle,
        }
    }

    /// All 16 types in canonical listing order.
    pub fn all() -> [MbtiType; 16] {
        const NAMES: [&str; 16] = [
            "ISTJ", "ISFJ", "INFJ", "INTJ", "ISTP", "ISFP", "INFP", "INTP", "ESTP", "ESFP",
            "ENFP", "ENTP", "ESTJ", "ESFJ", "ENFJ", "ENTJ",
        ];
        NAMES.map(|name| name.parse().expect("canonical MBTI name"))
    }

    pub fn letters(&self) -> [char; 4] {
        [
            match self.attitude {
                Attitude::Extraverted => 'E',
                Attitude::Introverted => 'I',
            },
            match self.perceiving {
                Perceiving::Sensing => 'S',
                Perceiving::Intuitive => 'N',
            },
            match self.judging {
                Judging::Thinking => 'T',
                Judging::Feeling => 'F',
            },
            match self.lifestyle {
                Lifestyle::Judging => 'J',
                Lifestyle::Perceiving => 'P',
            },
        ]
    }
}

impl fmt::Display for MbtiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.letters() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for MbtiType {
    type Err = MbtiParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 4 {
            return Err(MbtiParseError::BadLength(chars.len()));
        }
        let up: Vec<char> = chars.iter().map(|c| c.to_ascii_uppercase()).collect();
        let attitude = match up[0] {
            'E' => Attitude::Extraverted,
            'I' => Attitude::Introverted,
            found => {
                return Err(MbtiParseError::BadLetter {
                    position: 1,
                    found,
                    expected: "E, I",
                })
            }
        };
        let perceiving = match up[1] {
            'S' => Perceiving::Sensing,
            'N' => Perceiving::Intuitive,
            found => {
                return Err(MbtiParseError::BadLetter {
                    position: 2,
                    found,
                    expected: "S, N",
                })
            }
        };
        let judging = match up[2] {
            'T' => Judging::Thinking,
            'F' => Judging::Feeling,
            found => {
                return Err(MbtiParseError::BadLetter {
                    position: 3,
                    found,
                    expected: "T, F",
                })
            }
        };
        let lifestyle = match up[3] {
            'J' => Lifestyle::Judging,
            'P' => Lifestyle::Perceiving,
            found => {
                return Err(MbtiParseError::BadLetter {
                    position: 4,
                    found,
                    expected: "J, P",
                })
            }
        };
        Ok(MbtiType::new(attitude, perceiving, judging, lifestyle))
    }
}

/// Answers to the ten-item short-form five-factor questionnaire,
/// Likert-coded 1..=5 in item order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionnaireResponse {
    answers: [u8; 10],
}

impl QuestionnaireResponse {
    pub fn new(answers: &[u8]) -> Result<QuestionnaireResponse, PersonalityError> {
        if answers.len() != 10 {
            return Err(PersonalityError::AnswerCount(answers.len()));
        }
        let mut out = [0u8; 10];
        for (i, &value) in answers.iter().enumerate() {
            if !(1..=5).contains(&value) {
                return Err(PersonalityError::AnswerOutOfRange {
                    item: i + 1,
                    value,
                });
            }
            out[i] = value;
        }
        Ok(QuestionnaireResponse { answers: out })
    }

    pub fn answers(&self) -> &[u8; 10] {
        &self.answers
    }
}

/// Per-trait item keying for the ten-item questionnaire: for each canonical
/// Big-Five dimension, the 1-based positively-keyed item and the 1-based
/// reverse-keyed item. Reverse items are 3, 5, 7, 8 and 10.
const BFI10_KEYING: [(usize, usize); 5] = [
    (4, 7),  // Openness
    (9, 3),  // Conscientiousness
    (1, 5),  // Extraversion
    (6, 8),  // Agreeableness
    (2, 10), // Neuroticism
];

/// Score a ten-item questionnaire response into a Big-Five trait vector.
///
/// Each trait is scored as the mean of its positively-keyed answer and its
/// reverse-scored answer (`6 - a`), rescaled from the 1..5 Likert range to
/// `[0, 1]` via `(m - 1) / 4`.
pub fn score_bfi10(resp: &QuestionnaireResponse) -> TraitVector {
    let answers = resp.answers();
    let scores = BFI10_KEYING
        .iter()
        .map(|&(pos, rev)| {
            let positive = f64::from(answers[pos - 1]);
            let reversed = 6.0 - f64::from(answers[rev - 1]);
            ((positive + reversed) / 2.0 - 1.0) / 4.0
        })
        .collect();
    TraitVector::new(PersonalityModelKind::Big5, scores).expect("scores lie in [0, 1]")
}

/// Label of the highest-scoring dimension; ties go to the earlier dimension
/// in the model's canonical order.
pub fn dominant_trait(p: &TraitVector) -> &'static str {
    let labels = p
        .model()
        .dimension_labels()
        .expect("trait vectors only exist for trait models");
    let mut best = 0;
    for (i, &score) in p.scores().iter().enumerate() {
        if score > p.scores()[best] {
            best = i;
        }
    }
    labels[best]
}
