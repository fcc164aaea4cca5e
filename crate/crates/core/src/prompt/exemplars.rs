//! Built-in demonstration exemplars and the exemplar bank.
//!
//! Banks are stored on disk in the canonical line-delimited format, one
//! [`BankEntry`] per line, keyed by task and role. The built-in bank ships
//! the published demonstrations: step-back question pairs for the four
//! knowledge/multi-hop tasks, principle triplets for MMLU Physics and
//! Chemistry, the combined principles-in-answer exemplar for GSM8K, and one
//! standard plus one chain-of-thought exemplar per task.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Exemplar, ExemplarRole, PromptError};
use crate::dataset::Task;

/// One bank line: an exemplar keyed by the task it demonstrates. Judge
/// pairs are task-independent and carry no task. `combined` marks the
/// GSM8K-style exemplar whose answer fuses principles and solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub combined: bool,
    #[serde(flatten)]
    pub exemplar: Exemplar,
}

#[derive(Debug, Clone, Default)]
pub struct ExemplarBank {
    entries: Vec<BankEntry>,
}

impl ExemplarBank {
    pub fn from_entries(entries: Vec<BankEntry>) -> Result<Self, PromptError> {
        let mut ids = BTreeSet::new();
        for entry in &entries {
            entry.exemplar.validate()?;
            if !ids.insert(entry.exemplar.id.clone()) {
                return Err(PromptError::DuplicateExemplar(entry.exemplar.id.clone()));
            }
        }
        Ok(Self { entries })
    }

    /// The bank shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_entries(builtin_entries()).expect("builtin bank is valid")
    }

    pub fn load_jsonl(path: &Path) -> Result<Self, PromptError> {
        let file = File::open(path).map_err(|e| PromptError::BankIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut entries = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| PromptError::BankIo {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: BankEntry =
                serde_json::from_str(&line).map_err(|e| PromptError::BankIo {
                    path: path.to_path_buf(),
                    message: format!("line {}: {}", idx + 1, e),
                })?;
            entries.push(entry);
        }
        Self::from_entries(entries)
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), PromptError> {
        let mut file = File::create(path).map_err(|e| PromptError::BankIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        for entry in &self.entries {
            let line = serde_json::to_string(entry).expect("bank entry serializes");
            writeln!(file, "{line}").map_err(|e| PromptError::BankIo {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Exemplars for a task and role, in bank order, combined ones excluded.
    pub fn get(&self, task: Task, role: ExemplarRole) -> Vec<&Exemplar> {
        self.entries
            .iter()
            .filter(|e| e.task == Some(task) && e.exemplar.role == role && !e.combined)
            .map(|e| &e.exemplar)
            .collect()
    }

    /// The combined principles-in-answer exemplar for a task, if any.
    pub fn stepback_combined(&self, task: Task) -> Option<&Exemplar> {
        self.entries
            .iter()
            .find(|e| e.task == Some(task) && e.combined)
            .map(|e| &e.exemplar)
    }

    /// Task-independent judge demonstration pairs, in bank order.
    pub fn judge_pairs(&self) -> Vec<&Exemplar> {
        self.entries
            .iter()
            .filter(|e| e.task.is_none() && e.exemplar.role == ExemplarRole::JudgePair)
            .map(|e| &e.exemplar)
            .collect()
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }
}

fn exemplar(id: &str, role: ExemplarRole, slots: &[(&str, &str)]) -> Exemplar {
    Exemplar {
        id: id.to_string(),
        role,
        slots: slots
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    }
}

fn entry(task: Task, ex: Exemplar) -> BankEntry {
    BankEntry {
        task: Some(task),
        combined: false,
        exemplar: ex,
    }
}

fn stepback_pair(task: Task, id: &str, original: &str, stepback: &str) -> BankEntry {
    entry(
        task,
        exemplar(
            id,
            ExemplarRole::StepbackPair,
            &[
                ("original_question", original),
                ("stepback_question", stepback),
            ],
        ),
    )
}

const PHYSICS_PRINCIPLE_QUESTION: &str = "A spherical conductor carries a net charge. How is this charge distributed on the sphere?\n0) The charge is evenly distributed on the surface.\n1) The charge resides on the surface only; the distribution of charge on the surface depends on what other charged objects are near the sphere.\n2) The charge moves continually within the sphere.\n3) The charge is distributed uniformly throughout the sphere.";

const PHYSICS_PRINCIPLES: &str = "Coulomb's Law: the force between two charged particles is proportional to the product of their charges and inversely proportional to the square of the distance between them, F = k * q1 * q2 / r, where F is the electric force, k is a constant, q1 and q2 are the charges the particles carry, and r is the distance between them.";

const PHYSICS_PRINCIPLE_ANSWER: &str = "Using the Principles of Coulomb's Law, we can solve the problem as following:\nStep 1: Apply Coulomb's Law to find out how charges are distributed on the surface.\nIn the case of a spherical conductor, the charges on the surface will repel each other. The further apart the charges are, the less force they will exert on each other. Therefore, the charges will distribute themselves evenly on the surface of the sphere, as this is the configuration that minimizes the repulsive force between them.\n\nStep 2: Apply Coulomb's Law to find out what happens if there are other charges present.\nThe distribution of charge on the surface may also be affected by the presence of other charged objects near the sphere. For example, if a negatively charged object is brought near a positively charged sphere, the negative charges on the sphere will be repelled and will move to the opposite side of the sphere. This will result in a non-uniform distribution of charge on the surface of the sphere.\n\nTherefore, the correct answer is 1) The charge resides on the surface only; the distribution of charge on the surface depends on what other charged objects are near the sphere.";

const CHEMISTRY_QUESTION: &str = "A sample of an unknown chloride compound was dissolved in water, and then titrated with excess Pb(NO3)2 to create a precipitate. After drying, it is determined there are 0.0050 mol of precipitate present. What mass of chloride is present in the original sample?\n0) 0.177 g\n1) 0.355 g\n2) 0.522 g\n3) 0.710 g";

const CHEMISTRY_PRINCIPLES: &str = "Precipitation reactions: Precipitation reactions occur when two soluble salts are mixed and form an insoluble product, called a precipitate. The precipitate can be separated from the solution by filtration or centrifugation.\nMolar mass: The molar mass of a substance is the mass of one mole of that substance. The molar mass is expressed in grams per mole (g/mol).\nLimiting reactant: The limiting reactant is the reactant that is completely consumed in a chemical reaction. The amount of product formed is determined by the amount of limiting reactant.";

const CHEMISTRY_PRINCIPLE_ANSWER: &str = "Assuming the unknown chloride compound is MCl, where M represents the metal cation, the balanced chemical equation for the precipitation reaction is:\nPb(NO3)2(aq) + 2MCl(aq) -> PbCl2(s) + 2MNO3(aq)\n\nSince Pb(NO3)2 is in excess, MCl is the limiting reactant. The stoichiometry of the reaction indicates that 2 moles of MCl produce 1 mole of PbCl2 precipitate. Therefore, 0.0050 mol of PbCl2 corresponds to 0.010 mol of MCl.\n\nThe mass of chloride in the original sample can be calculated using the molar mass of chloride (35.45 g/mol):\n0.010 mol Cl × 35.45 g/mol = 0.355 g Cl\n\nThe correct answer is 1) 0.355 g.";

const GSM8K_QUESTION: &str = "Bella bought stamps at the post office. Some of the stamps had a snowflake design, some had a truck design, and some had a rose design. Bella bought 11 snowflake stamps. She bought 9 more truck stamps than snowflake stamps, and 13 fewer rose stamps than truck stamps. How many stamps did Bella buy in all?";

const GSM8K_COMBINED_ANSWER: &str = "Let us find and apply the math principles to solve the problem step by step:\n\nStep 1. Addition: Calculate the number of truck stamps.\nBella bought 11 snowflake stamps. She bought 9 more truck stamps than snowflake stamps: there are 11 + 9 = 20 truck stamps.\n\nStep 2. Subtraction: Calculate the number of rose stamps.\nBella bought 13 fewer rose stamps than truck stamps: there are 20 - 13 = 7 rose stamps.\n\nStep 3. Addition: Calculate the total number of stamps in all three colors.\nBella bought 11 snowflake stamps, 20 truck stamps, 7 rose stamps: there are 11 + 20 + 7 = 38 stamps in total.\n\nConclusion: Bella bought 38 stamps in all.";

const PHYSICS_QA_QUESTION: &str = "A point charge, Q1 = +1 mC, is fixed at the origin. How much work is required to move another charge, Q2 = +8 μC, from the point (0, 4 meters) to the point (3 meters, 0)?\n0) 3.5 J\n1) 6.0 J\n2) 22.5 J\n3) 40 J";

const PHYSICS_QA_ANSWER: &str = "The work required to move a charge in an electric field is equal to the change in potential energy of the charge. The potential energy of a charge in an electric field is given by: U = k * Q1 * Q2 / r, where: k is the Coulomb constant, Q1 and Q2 are the charges, r is the distance between the charges.\nIn this case, the initial potential energy of Q2 is:\nU1 = k * Q1 * Q2 / 4 meters\n\nThe final potential energy of Q2 is:\nU2 = k * Q1 * Q2 / 3 meters\n\nThe change in potential energy is:\nΔU = U2 - U1 = k * Q1 * Q2 * (1/3 meters - 1/4 meters)\n\nPlugging in the values, we get:\nΔU = (9 × 10^9 N*m^2/C^2) × (1 × 10^-3 C) * (8 × 10^-6 C) * (1/3m - 1/4m) = 6 J.\nThe answer is 1) 6.0 J.";

const PHYSICS_COT_ANSWER: &str = "Sure, let's think step by step.\n\n1. Calculate the electric potential energy of Q2 at the initial position. The electric potential energy (U) of a point charge Q2 at a distance r from another point charge Q1 is given by the following equation: U = k * Q1 * Q2 / r, where k is Coulomb's constant.\n\nTherefore, the electric potential energy of Q2 at the initial position is:\nU_initial = (9 × 10^9 N m^2 / C^2) * (1 × 10^-3 C) * (8 × 10^-6 C) / 4 m = 18 J\n\n2. Calculate the electric potential energy of Q2 at the final position. The electric potential energy of Q2 at the final position is:\nU_final = (9 × 10^9 N m^2 / C^2) * (1 × 10^-3 C) * (8 × 10^-6 C) / 3 m = 24 J\n\n3. Calculate the work required to move Q2 from the initial position to the final position. The work (W) required to move a charge from one position to another is equal to the change in electric potential energy (ΔU) between the two positions.\nW = ΔU = U_final - U_initial = 24 J - 18 J = 6 J\n\nTherefore, the answer is 1) 6.0 J.";

const CHEMISTRY_QA_ANSWER: &str = "0.0050 moles of lead chloride precipitate contain 0.010 moles of chloride ions due to the 2:1 mole ratio between chloride ions and lead chloride.\n\nThe mass of 0.010 moles of chloride ions is 0.355 g.\n\nTherefore, the mass of chloride present in the original sample is 0.355 g.";

const CHEMISTRY_COT_ANSWER: &str = "Here's the step-by-step solution:\nIdentify the precipitate: The precipitate formed when a chloride compound reacts with lead nitrate (Pb(NO3)2) is lead chloride (PbCl2).\n\nDetermine the mole ratio: The balanced chemical equation for the reaction between a chloride compound (represented as MCl, where M is the unknown metal) and lead nitrate is: 2MCl + Pb(NO3)2 -> 2MNO3 + PbCl2\n\nFrom the balanced equation, you can see that 2 moles of chloride ions (Cl-) react with 1 mole of lead nitrate to produce 1 mole of lead chloride precipitate. Additionally, 1 mole of lead chloride contains 2 moles of chloride ions.\n\nCalculate the moles of chloride ions: Since 0.0050 moles of lead chloride precipitate were formed, there must have been 2 × 0.0050 = 0.010 moles of chloride ions in the original sample.\n\nCalculate the mass of chloride ions: The molar mass of chlorine (Cl) is 35.45 g/mol. Therefore, the mass of 0.010 moles of chloride ions is:\nmass = moles × molar mass = 0.010 mol × 35.45 g/mol = 0.355 g\n\nTherefore, the mass of chloride present in the original sample is 0.355 g. The correct answer is option 1.";

const GSM8K_QA_ANSWER: &str = "The number of truck stamps is 11 + 9 = 20. The number of rose stamps is 20 - 13 = 7. Bella bought 11 + 20 + 7 = 38 stamps in all.";

const GSM8K_COT_ANSWER: &str = "Here are the steps to solve the problem:\n\nStep 1: Find the number of truck stamps. Adding 9 to the number of snowflake stamps gives the number of truck stamps: 11 + 9 = 20\n\nStep 2: Find the number of rose stamps. Subtracting 13 from the number of truck stamps gives the number of rose stamps: 20 - 13 = 7\n\nStep 3: Add the number of snowflake, truck, and rose stamps to find the total number of stamps Bella bought: 11 + 20 + 7 = 38\n\nSolution: Bella bought 38 stamps in all.";

const TIMEQA_QA_QUESTION: &str = "Who was the spouse of Anna Karina from 1968 to 1974?";

const TIMEQA_QA_ANSWER: &str =
    "Anna Karina's spouse from 1968 to 1974 was French actor Pierre Fabre.";

const TIMEQA_COT_ANSWER: &str = "Step 1: Identify Anna Karina's spouses: Jean-Luc Godard (1961–1965).\nPierre Fabre (1968–1974)\nDaniel Duval (1978–1981)\nDennis Berry (1982–1994)\n\nStep 2: Determine which spouse was married to Anna Karina from 1968 to 1974.\nJean-Luc Godard was married to Anna Karina from 1961 to 1965, so he is not the correct answer.\nPierre Fabre was married to Anna Karina from 1968 to 1974, so he is the correct answer.\nDaniel Duval was married to Anna Karina from 1978 to 1981, so he is not the correct answer.\nDennis Berry was married to Anna Karina from 1982 to 1994, so he is not the correct answer.\n\nTherefore, Anna Karina's spouse from 1968 to 1974 was Pierre Fabre.";

const SITUATEDQA_QA_QUESTION: &str =
    "what is the biggest hotel in las vegas nv as of November 28, 1993";

const SITUATEDQA_QA_ANSWER: &str = "The biggest hotel in Las Vegas, Nevada as of November 28, 1993 was the Excalibur Hotel & Casino.";

const SITUATEDQA_COT_ANSWER: &str = "Sure, let's think step by step:\n\nWhat were the largest hotels in Las Vegas in 1993?\nAccording to a 1993 article in the Las Vegas Review-Journal, the largest hotels in Las Vegas at the time were:\n\nMGM Grand (5,005 rooms)\nExcalibur (4,008 rooms)\nThe Mirage (3,049 rooms)\nFlamingo Hilton (3,565 rooms)\nCaesars Palace (2,577 rooms)\nWhich of these hotels was the largest on November 28, 1993?\nThe MGM Grand opened in December 1993, so it would not have been the largest hotel on November 28, 1993. The Excalibur opened in June 1990, so it would have been the largest hotel on November 28, 1993.\n\nTherefore, the largest hotel in Las Vegas on November 28, 1993 was the Excalibur.";

const MUSIQUE_QA_QUESTION: &str =
    "What year saw the creation of the region where the county of Hertfordshire is located?";

const MUSIQUE_COT_ANSWER: &str = "The county of Hertfordshire is in the 'East of England' region. The 'East of England' region was created in 1994. So, the answer is 1994.";

const STRATEGYQA_QA_QUESTION: &str =
    "Would a Monoamine Oxidase candy bar cheer up a depressed friend?";

const STRATEGYQA_QA_ANSWER: &str = "A Monoamine Oxidase (MAO) candy bar would not cheer up a depressed friend. MAO is an enzyme that breaks down neurotransmitters such as serotonin, dopamine, and norepinephrine. These neurotransmitters are associated with mood, so inhibiting MAO can lead to an increase in their levels.";

const STRATEGYQA_COT_ANSWER: &str = "No, a Monoamine Oxidase (MAO) candy bar would not cheer up a depressed friend. In fact, it could be dangerous for them to consume. Here's a step-by-step explanation:\n\n1. MAO is an enzyme that breaks down neurotransmitters like serotonin, dopamine, and norepinephrine. These neurotransmitters are important for regulating mood, and low levels of them are associated with depression.\n\n2. MAO inhibitors (MAOIs) are a type of medication that blocks the action of MAO, which can increase levels of these neurotransmitters in the brain. MAOIs are sometimes used to treat depression, but they can have serious side effects, including interactions with certain foods and medications.\n\n3. A MAO candy bar would not contain enough MAOI to have a therapeutic effect on depression. In fact, it is unlikely that a candy bar could contain any MAOI at all, as these medications are typically taken in pill form.\n\nIn conclusion, a MAO candy bar would not cheer up a depressed friend and could even be dangerous for them to consume.";

const JUDGE_MUZYCHUK_ANSWER_1: &str = "Anna Muzychuk was conferred the title of International Master (IM) in 2007. She earned the title by scoring three norms in rapid chess tournaments.";

fn builtin_entries() -> Vec<BankEntry> {
    let mut entries = vec![
        // step-back question pairs
        stepback_pair(
            Task::Timeqa,
            "timeqa_stepback_1",
            "Which position did Knox Cunningham hold from May 1955 to Apr 1956?",
            "Which positions have Knox Cunningham held in his career?",
        ),
        stepback_pair(
            Task::Timeqa,
            "timeqa_stepback_2",
            "Who was the spouse of Anna Karina from 1968 to 1974?",
            "Who were the spouses of Anna Karina?",
        ),
        stepback_pair(
            Task::Timeqa,
            "timeqa_stepback_3",
            "Which team did Thierry Audel play for from 2007 to 2008?",
            "Which teams did Thierry Audel play for in his career?",
        ),
        stepback_pair(
            Task::Timeqa,
            "timeqa_stepback_4",
            "What was the operator of GCR Class 11E from 1913 to Dec 1922?",
            "What were the operators of GCR Class 11E in history?",
        ),
        stepback_pair(
            Task::Timeqa,
            "timeqa_stepback_5",
            "Which country did Sokolovsko belong to from 1392 to 1525?",
            "Which countries did Sokolovsko belong to in history?",
        ),
        stepback_pair(
            Task::Situatedqa,
            "situatedqa_stepback_1",
            "when was the last time a team from canada won the stanley cup as of 2002",
            "which years did a team from canada won the stanley cup as of 2002",
        ),
        stepback_pair(
            Task::Situatedqa,
            "situatedqa_stepback_2",
            "when did england last get to the semi final in a world cup as of 2019",
            "which years did england get to the semi final in a world cup as of 2019?",
        ),
        stepback_pair(
            Task::Situatedqa,
            "situatedqa_stepback_3",
            "what is the biggest hotel in las vegas nv as of November 28, 1993",
            "what is the size of the hotels in las vegas nv as of November 28, 1993",
        ),
        stepback_pair(
            Task::Situatedqa,
            "situatedqa_stepback_4",
            "who has scored most runs in t20 matches as of 2017",
            "What are the runs of players in t20 matches as of 2017",
        ),
        stepback_pair(
            Task::Situatedqa,
            "situatedqa_stepback_5",
            "who is the highest paid player in the nba this season as of 2017",
            "what is the salary of the high paid players in the nba this season as of 2017",
        ),
        stepback_pair(
            Task::Musique,
            "musique_stepback_1",
            "at year saw the creation of the region where the county of Hertfordshire is located?",
            "which region is the county of Hertfordshire located?",
        ),
        stepback_pair(
            Task::Musique,
            "musique_stepback_2",
            "Jan Šindel's was born in what country?",
            "what is Jan Šindel's personal history?",
        ),
        stepback_pair(
            Task::Musique,
            "musique_stepback_3",
            "When was the abolishment of the studio that distributed The Game?",
            "which studio distributed The Game?",
        ),
        stepback_pair(
            Task::Musique,
            "musique_stepback_4",
            "What city is the person who broadened the doctrine of philosophy of language from?",
            "who broadened the doctrine of philosophy of language",
        ),
        stepback_pair(
            Task::Musique,
            "musique_stepback_5",
            "When was the baseball team winning the world series in 2015 baseball created?",
            "which baseball team won the world series in 2015 baseball?",
        ),
        stepback_pair(
            Task::Strategyqa,
            "strategyqa_stepback_1",
            "Could the members of The Police perform lawful arrests?",
            "what can the members of The Police do?",
        ),
        stepback_pair(
            Task::Strategyqa,
            "strategyqa_stepback_2",
            "Would a Monoamine Oxidase candy bar cheer up a depressed friend?",
            "What are the effects of Monoamine Oxidase?",
        ),
        stepback_pair(
            Task::Strategyqa,
            "strategyqa_stepback_3",
            "Would a dog respond to bell before Grey seal?",
            "Would a dog respond to bell before Grey seal?",
        ),
        stepback_pair(
            Task::Strategyqa,
            "strategyqa_stepback_4",
            "Is shrimp scampi definitely free of plastic?",
            "what is shrimp scampi made of?",
        ),
        stepback_pair(
            Task::Strategyqa,
            "strategyqa_stepback_5",
            "Do the anchors on Rede Globo speak Chinese?",
            "What languages do the anchors on Rede Globo speak?",
        ),
        // principle triplets
        entry(
            Task::MmluPhysics,
            exemplar(
                "mmlu_physics_principle_1",
                ExemplarRole::PrincipleTriplet,
                &[
                    ("question", PHYSICS_PRINCIPLE_QUESTION),
                    ("principles", PHYSICS_PRINCIPLES),
                    ("answer", PHYSICS_PRINCIPLE_ANSWER),
                ],
            ),
        ),
        entry(
            Task::MmluChemistry,
            exemplar(
                "mmlu_chemistry_principle_1",
                ExemplarRole::PrincipleTriplet,
                &[
                    ("question", CHEMISTRY_QUESTION),
                    ("principles", CHEMISTRY_PRINCIPLES),
                    ("answer", CHEMISTRY_PRINCIPLE_ANSWER),
                ],
            ),
        ),
        // standard one-shot exemplars
        entry(
            Task::MmluPhysics,
            exemplar(
                "mmlu_physics_qa_1",
                ExemplarRole::Qa,
                &[("question", PHYSICS_QA_QUESTION), ("answer", PHYSICS_QA_ANSWER)],
            ),
        ),
        entry(
            Task::MmluChemistry,
            exemplar(
                "mmlu_chemistry_qa_1",
                ExemplarRole::Qa,
                &[("question", CHEMISTRY_QUESTION), ("answer", CHEMISTRY_QA_ANSWER)],
            ),
        ),
        entry(
            Task::Gsm8k,
            exemplar(
                "gsm8k_qa_1",
                ExemplarRole::Qa,
                &[("question", GSM8K_QUESTION), ("answer", GSM8K_QA_ANSWER)],
            ),
        ),
        entry(
            Task::Timeqa,
            exemplar(
                "timeqa_qa_1",
                ExemplarRole::Qa,
                &[("question", TIMEQA_QA_QUESTION), ("answer", TIMEQA_QA_ANSWER)],
            ),
        ),
        entry(
            Task::Situatedqa,
            exemplar(
                "situatedqa_qa_1",
                ExemplarRole::Qa,
                &[
                    ("question", SITUATEDQA_QA_QUESTION),
                    ("answer", SITUATEDQA_QA_ANSWER),
                ],
            ),
        ),
        entry(
            Task::Musique,
            exemplar(
                "musique_qa_1",
                ExemplarRole::Qa,
                &[("question", MUSIQUE_QA_QUESTION), ("answer", "1994")],
            ),
        ),
        entry(
            Task::Strategyqa,
            exemplar(
                "strategyqa_qa_1",
                ExemplarRole::Qa,
                &[
                    ("question", STRATEGYQA_QA_QUESTION),
                    ("answer", STRATEGYQA_QA_ANSWER),
                ],
            ),
        ),
        // chain-of-thought one-shot exemplars
        entry(
            Task::MmluPhysics,
            exemplar(
                "mmlu_physics_cot_1",
                ExemplarRole::Cot,
                &[("question", PHYSICS_QA_QUESTION), ("answer", PHYSICS_COT_ANSWER)],
            ),
        ),
        entry(
            Task::MmluChemistry,
            exemplar(
                "mmlu_chemistry_cot_1",
                ExemplarRole::Cot,
                &[("question", CHEMISTRY_QUESTION), ("answer", CHEMISTRY_COT_ANSWER)],
            ),
        ),
        entry(
            Task::Gsm8k,
            exemplar(
                "gsm8k_cot_1",
                ExemplarRole::Cot,
                &[("question", GSM8K_QUESTION), ("answer", GSM8K_COT_ANSWER)],
            ),
        ),
        entry(
            Task::Timeqa,
            exemplar(
                "timeqa_cot_1",
                ExemplarRole::Cot,
                &[("question", TIMEQA_QA_QUESTION), ("answer", TIMEQA_COT_ANSWER)],
            ),
        ),
        entry(
            Task::Situatedqa,
            exemplar(
                "situatedqa_cot_1",
                ExemplarRole::Cot,
                &[
                    ("question", SITUATEDQA_QA_QUESTION),
                    ("answer", SITUATEDQA_COT_ANSWER),
                ],
            ),
        ),
        entry(
            Task::Musique,
            exemplar(
                "musique_cot_1",
                ExemplarRole::Cot,
                &[("question", MUSIQUE_QA_QUESTION), ("answer", MUSIQUE_COT_ANSWER)],
            ),
        ),
        entry(
            Task::Strategyqa,
            exemplar(
                "strategyqa_cot_1",
                ExemplarRole::Cot,
                &[
                    ("question", STRATEGYQA_QA_QUESTION),
                    ("answer", STRATEGYQA_COT_ANSWER),
                ],
            ),
        ),
        // judge demonstration pairs
        BankEntry {
            task: None,
            combined: false,
            exemplar: exemplar(
                "judge_pair_muzychuk",
                ExemplarRole::JudgePair,
                &[
                    ("question", "Which title was conferred to Anna Muzychuk in 2007?"),
                    ("answer_1", JUDGE_MUZYCHUK_ANSWER_1),
                    ("answer_2", "International Master"),
                    ("answer_1_short", "International Master"),
                    ("answer_2_short", "International Master"),
                    ("verdict", "Yes"),
                ],
            ),
        },
        BankEntry {
            task: None,
            combined: false,
            exemplar: exemplar(
                "judge_pair_seattle",
                ExemplarRole::JudgePair,
                &[
                    ("question", "What state is Seattle located in?"),
                    ("answer_1", "Seattle is in Washington State."),
                    ("answer_2", "The answer is George Washington."),
                    ("answer_1_short", "Washington State"),
                    ("answer_2_short", "George Washington"),
                    ("verdict", "No"),
                ],
            ),
        },
    ];
    // GSM8K combined exemplar: principles fused into the answer, used by the
    // step-back flow with the standard prompt shape.
    entries.push(BankEntry {
        task: Some(Task::Gsm8k),
        combined: true,
        exemplar: exemplar(
            "gsm8k_stepback_combined_1",
            ExemplarRole::Qa,
            &[("question", GSM8K_QUESTION), ("answer", GSM8K_COMBINED_ANSWER)],
        ),
    });
    entries
}
