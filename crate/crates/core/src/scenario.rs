//! Expected-value arithmetic for the discrete high/low value example:
//! journals with known numbers of high- and low-value articles, and fixed
//! probabilities of being highly cited given the value class.
//!
//! Everything is exact rational arithmetic.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// High- and low-value article counts of one journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JournalComposition {
    pub high_value: u64,
    pub low_value: u64,
}

impl JournalComposition {
    pub fn size(&self) -> u64 {
        self.high_value + self.low_value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScenario {
    /// P(highly cited | high value).
    pub q: Rational,
    /// P(highly cited | low value).
    pub r: Rational,
    pub journals: Vec<JournalComposition>,
}

/// Parses a probability written as a decimal (`0.9`) or a fraction (`9/10`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: i128 = num.trim().parse().ok()?;
        let den: i128 = den.trim().parse().ok()?;
        return (den != 0).then(|| Ratio::new(num, den));
    }
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
        || frac_part.len() > 30
    {
        return None;
    }
    let scale = 10i128.checked_pow(frac_part.len() as u32)?;
    let int: i128 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().ok()?
    };
    let frac: i128 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().ok()?
    };
    let num = int.checked_mul(scale)?.checked_add(frac)?;
    Some(Ratio::new(if negative { -num } else { num }, scale))
}

/// Journal label by position: A, B, ..., Z, J27, J28, ...
pub fn journal_label(index: usize) -> String {
    if index < 26 {
        char::from(b'A' + index as u8).to_string()
    } else {
        format!("J{}", index + 1)
    }
}

impl DiscreteScenario {
    pub fn new(q: Rational, r: Rational, journals: Vec<JournalComposition>) -> Result<Self> {
        let s = DiscreteScenario { q, r, journals };
        s.validate()?;
        Ok(s)
    }

    /// 90% / 10% citedness; journal A 80 high-value articles, B 20.
    pub fn scenario_1() -> Self {
        Self::two_journal(Ratio::new(9, 10), Ratio::new(1, 10))
    }

    /// 70% / 30% citedness with the same journal compositions.
    pub fn scenario_2() -> Self {
        Self::two_journal(Ratio::new(7, 10), Ratio::new(3, 10))
    }

    fn two_journal(q: Rational, r: Rational) -> Self {
        DiscreteScenario {
            q,
            r,
            journals: vec![
                JournalComposition {
                    high_value: 80,
                    low_value: 20,
                },
                JournalComposition {
                    high_value: 20,
                    low_value: 80,
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = Ratio::from_integer(0)..=Ratio::from_integer(1);
        if !unit.contains(&self.q) {
            return Err(Error::param(
                "q",
                format!("probability {} outside [0, 1]", self.q),
            ));
        }
        if !unit.contains(&self.r) {
            return Err(Error::param(
                "r",
                format!("probability {} outside [0, 1]", self.r),
            ));
        }
        if self.journals.is_empty() {
            return Err(Error::param("journals", "need at least one journal"));
        }
        if self.total_articles() == 0 {
            return Err(Error::param("journals", "need at least one article"));
        }
        Ok(())
    }

    pub fn total_articles(&self) -> u64 {
        self.journals.iter().map(JournalComposition::size).sum()
    }

    pub fn total_high_value(&self) -> u64 {
        self.journals.iter().map(|j| j.high_value).sum()
    }

    pub fn total_low_value(&self) -> u64 {
        self.journals.iter().map(|j| j.low_value).sum()
    }
}

fn int(n: u64) -> Rational {
    Ratio::from_integer(n as i128)
}

/// Expected 2x2 table of one journal: value class by citedness.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalBreakdown {
    pub low_value_lowly_cited: Rational,
    pub low_value_highly_cited: Rational,
    pub high_value_lowly_cited: Rational,
    pub high_value_highly_cited: Rational,
}

impl JournalBreakdown {
    fn of(composition: &JournalComposition, q: Rational, r: Rational) -> Self {
        let one = Ratio::from_integer(1);
        let high = int(composition.high_value);
        let low = int(composition.low_value);
        JournalBreakdown {
            low_value_lowly_cited: (one - r) * low,
            low_value_highly_cited: r * low,
            high_value_lowly_cited: (one - q) * high,
            high_value_highly_cited: q * high,
        }
    }

    pub fn low_value_total(&self) -> Rational {
        self.low_value_lowly_cited + self.low_value_highly_cited
    }

    pub fn high_value_total(&self) -> Rational {
        self.high_value_lowly_cited + self.high_value_highly_cited
    }

    pub fn lowly_cited_total(&self) -> Rational {
        self.low_value_lowly_cited + self.high_value_lowly_cited
    }

    pub fn highly_cited_total(&self) -> Rational {
        self.low_value_highly_cited + self.high_value_highly_cited
    }

    pub fn total(&self) -> Rational {
        self.low_value_total() + self.high_value_total()
    }

    /// Share of highly cited articles; zero for an empty journal.
    pub fn highly_cited_share(&self) -> Rational {
        let total = self.total();
        if total == Ratio::from_integer(0) {
            total
        } else {
            self.highly_cited_total() / total
        }
    }

    fn add(&self, other: &JournalBreakdown) -> JournalBreakdown {
        JournalBreakdown {
            low_value_lowly_cited: self.low_value_lowly_cited + other.low_value_lowly_cited,
            low_value_highly_cited: self.low_value_highly_cited + other.low_value_highly_cited,
            high_value_lowly_cited: self.high_value_lowly_cited + other.high_value_lowly_cited,
            high_value_highly_cited: self.high_value_highly_cited + other.high_value_highly_cited,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBreakdown {
    pub journals: Vec<JournalBreakdown>,
}

impl ScenarioBreakdown {
    /// Cell-wise sum over journals.
    pub fn totals(&self) -> JournalBreakdown {
        let zero = JournalBreakdown::of(
            &JournalComposition {
                high_value: 0,
                low_value: 0,
            },
            Ratio::from_integer(0),
            Ratio::from_integer(0),
        );
        self.journals.iter().fold(zero, |acc, j| acc.add(j))
    }
}

pub fn breakdown(scenario: &DiscreteScenario) -> ScenarioBreakdown {
    ScenarioBreakdown {
        journals: scenario
            .journals
            .iter()
            .map(|c| JournalBreakdown::of(c, scenario.q, scenario.r))
            .collect(),
    }
}

/// Journal indices by descending expected share of highly cited articles
/// (the IF order); equal shares keep their listed order.
pub fn if_ranking(breakdown: &ScenarioBreakdown) -> Vec<usize> {
    let mut order: Vec<usize> = (0..breakdown.journals.len()).collect();
    order.sort_by(|&a, &b| {
        breakdown.journals[b]
            .highly_cited_share()
            .cmp(&breakdown.journals[a].highly_cited_share())
    });
    order
}

/// Takes whole journals in IF order until `select_count` articles are taken;
/// returns the percentage of them that are high value.
pub fn if_selection_accuracy(scenario: &DiscreteScenario, select_count: u64) -> Result<Rational> {
    scenario.validate()?;
    if select_count == 0 {
        return Err(Error::param(
            "select_count",
            "must select at least one article",
        ));
    }
    let ranking = if_ranking(&breakdown(scenario));
    let mut taken = 0u64;
    let mut high = 0u64;
    for j in ranking {
        if taken == select_count {
            break;
        }
        let journal = &scenario.journals[j];
        taken += journal.size();
        high += journal.high_value;
    }
    if taken != select_count {
        return Err(Error::param(
            "select_count",
            format!("{select_count} does not fall on a whole-journal boundary of the IF ranking"),
        ));
    }
    Ok(int(high) * int(100) / int(select_count))
}

/// Expected percentage of high-value articles among all highly cited ones.
pub fn citation_selection_accuracy(scenario: &DiscreteScenario) -> Result<Rational> {
    scenario.validate()?;
    let high_cited_high = scenario.q * int(scenario.total_high_value());
    let high_cited_low = scenario.r * int(scenario.total_low_value());
    let highly_cited = high_cited_high + high_cited_low;
    if highly_cited == Ratio::from_integer(0) {
        return Err(Error::param(
            "q",
            "no article is expected to be highly cited",
        ));
    }
    Ok(high_cited_high * int(100) / highly_cited)
}

/// Everything the scenario report shows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResults {
    pub scenario: DiscreteScenario,
    pub breakdown: ScenarioBreakdown,
    pub ranking: Vec<usize>,
    pub select_count: u64,
    pub if_accuracy: Rational,
    pub citation_accuracy: Rational,
}

/// Evaluates the scenario. `select_count` defaults to the size of the
/// top-ranked journal.
pub fn evaluate(scenario: &DiscreteScenario, select_count: Option<u64>) -> Result<ScenarioResults> {
    scenario.validate()?;
    let breakdown = breakdown(scenario);
    let ranking = if_ranking(&breakdown);
    let select_count = select_count.unwrap_or_else(|| scenario.journals[ranking[0]].size());
    Ok(ScenarioResults {
        if_accuracy: if_selection_accuracy(scenario, select_count)?,
        citation_accuracy: citation_selection_accuracy(scenario)?,
        scenario: scenario.clone(),
        breakdown,
        ranking,
        select_count,
    })
}
