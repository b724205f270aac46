//! Rebuild a statechart from hand-written scenarios.

use statebdd::{parse_feature, recover_statechart, render_scdl, validate};

const TEXT: &str = "\
Process: Library Loan
Subject: book

Scenario: borrow
  GIVEN the book does not exist yet
  WHEN a librarian catalogues it
  THEN the book is On Shelf

Scenario: lend
  GIVEN the book is On Shelf
    AND the member has no fines
  WHEN a member borrows it for <days> days
  THEN the book is On Loan
    AND a due date <days> days ahead is recorded

Scenario: renew
  GIVEN the book is On Loan
    AND nobody reserved it OR the member is staff
  WHEN the member renews it
  THEN the book remains On Loan

Scenario: return
  GIVEN the book is On Loan
  WHEN the member returns it
  THEN the book is On Shelf

Scenario: withdraw
  GIVEN the book is On Shelf
  WHEN it is withdrawn
  THEN the book is Withdrawn and the process is finished
";

fn main() -> statebdd::Result<()> {
    let chart = recover_statechart(&parse_feature(TEXT)?)?;
    println!("{}", validate(&chart));
    print!("{}", render_scdl(&chart)?);
    Ok(())
}
