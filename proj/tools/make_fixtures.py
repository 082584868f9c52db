#!/usr/bin/env python3
"""Regenerates the CSV fixtures under data/fixtures.

The scripted transcripts are generated separately by make_transcripts.py.
"""
import csv
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"


def grade(score):
    if score >= 85:
        return "A"
    if score >= 70:
        return "B"
    if score >= 55:
        return "C"
    if score >= 40:
        return "D"
    return "F"


def students():
    rng = random.Random(11)
    rows = []
    for _ in range(40):
        study = round(rng.uniform(0.5, 6.0), 1)
        attendance = rng.randint(55, 100)
        participation = rng.randint(1, 10)
        homework = rng.randint(40, 100)
        test = min(100, max(0, int(20 + study * 8 + (attendance - 55) * 0.5 + rng.randint(-12, 12))))
        rows.append({
            "sex": rng.choice(["F", "M"]),
            "age": rng.randint(15, 19),
            "address": rng.choice(["U", "R"]),
            "study_hours": study,
            "attendance": attendance,
            "participation": participation,
            "homework_scores": homework,
            "test_scores": test,
            "absences": rng.randint(0, 12),
            "final_grade": grade(test),
        })
    return rows


def flights():
    # 16 rows; after delay_duration > 15 and departure_airport = JFK, 6 rows remain with
    # delay_severity split 4 severe / 2 moderate, so the majority fraction is 4/6.
    data = [
        ("JFK", "LAX", "AA", "2023-03-01T08:00", "2023-03-01T11:30", "clear", 20, "moderate"),
        ("JFK", "ORD", "UA", "2023-03-01T09:15", "2023-03-01T11:00", "rain", 45, "severe"),
        ("JFK", "SFO", "DL", "2023-03-02T07:30", "2023-03-02T11:10", "snow", 90, "severe"),
        ("JFK", "MIA", "AA", "2023-03-02T12:00", "2023-03-02T15:05", "clear", 5, "minor"),
        ("JFK", "ATL", "DL", "2023-03-03T06:45", "2023-03-03T09:20", "fog", 60, "severe"),
        ("JFK", "BOS", "B6", "2023-03-03T14:00", "2023-03-03T15:10", "rain", 30, "moderate"),
        ("JFK", "DEN", "UA", "2023-03-04T10:30", "2023-03-04T13:45", "snow", 120, "severe"),
        ("JFK", "SEA", "AS", "2023-03-04T16:20", "2023-03-04T19:55", "clear", 15, "minor"),
        ("LGA", "ORD", "AA", "2023-03-01T08:30", "2023-03-01T10:15", "rain", 50, "severe"),
        ("LGA", "ATL", "DL", "2023-03-02T09:00", "2023-03-02T11:40", "clear", 10, "minor"),
        ("EWR", "LAX", "UA", "2023-03-02T13:10", "2023-03-02T16:30", "fog", 35, "moderate"),
        ("EWR", "MIA", "B6", "2023-03-03T07:00", "2023-03-03T10:05", "clear", 0, "minor"),
        ("LGA", "DEN", "UA", "2023-03-03T15:45", "2023-03-03T18:20", "snow", 75, "severe"),
        ("EWR", "BOS", "B6", "2023-03-04T11:00", "2023-03-04T12:05", "rain", 25, "moderate"),
        ("JFK", "PHX", "AA", "2023-03-05T08:10", "2023-03-05T11:25", "clear", 12, "minor"),
        ("LGA", "SFO", "DL", "2023-03-05T17:30", "2023-03-05T21:00", "clear", 40, "moderate"),
    ]
    cols = ["departure_airport", "arrival_airport", "airline", "scheduled_departure_time",
            "scheduled_arrival_time", "weather_conditions", "delay_duration", "delay_severity"]
    return cols, data


def write(name, header, rows):
    with open(OUT / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    s = students()
    write("student_performance.csv", list(s[0].keys()), [list(r.values()) for r in s])
    # 5 pass / 3 fail: majority fraction 0.625.
    write("baseline8.csv", ["hours", "score", "label"], [
        [1, 40, "fail"], [2, 55, "pass"], [3, 61, "pass"], [4, 32, "fail"],
        [5, 70, "pass"], [6, 66, "pass"], [7, 29, "fail"], [8, 80, "pass"],
    ])
    cols, data = flights()
    write("flights_toy.csv", cols, data)


if __name__ == "__main__":
    main()
