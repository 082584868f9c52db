#!/usr/bin/env python3
"""Writes the student-performance session fixtures under data/transcripts.

  student_session.script.jsonl   strict-order scripted provider replies
  student_session.turns.json     dataset path and user utterances in order
  student_session.golden.json    the PeTEL the session must end with

The bundled event log under student_session_log/ is produced by running the
session through the engine and copying the log and dataset side file:

  dschat chat --dataset data/fixtures/student_performance.csv \
      --scripted data/transcripts/student_session.script.jsonl --strict \
      --utterances data/transcripts/student_session.turns.json \
      --data-dir /tmp/log --seed 0
"""
import copy
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "transcripts"

SUMMARY = {
    "dataset_summary": (
        "This dataset contains information about students in a school. It includes their demographic "
        "information such as sex, age and address, their study habits such as weekly study hours, "
        "attendance and participation, and their academic performance such as homework scores, test "
        "scores, absences and the final letter grade"
    ),
    "columns": [
        {"name": "sex", "description": "student sex (F or M)"},
        {"name": "age", "description": "student age in years"},
        {"name": "address", "description": "home address type (U urban, R rural)"},
        {"name": "study_hours", "description": "average daily study hours"},
        {"name": "attendance", "description": "attendance percentage"},
        {"name": "participation", "description": "class participation score from 1 to 10"},
        {"name": "homework_scores", "description": "average homework score"},
        {"name": "test_scores", "description": "average test score"},
        {"name": "absences", "description": "number of school absences"},
        {"name": "final_grade", "description": "final letter grade from A to F"},
    ],
    "sample row": "A 16 year old female student from a rural address who studies 3 hours a day, attends 90% "
                  "of classes and finished with a C.",
    "trend": "Students who study more hours and attend more classes tend to have higher test scores and "
             "better final grades.",
}

TASKS = (
    "Based on the provided dataset summary, the following are the suitable ML tasks:\n\n"
    "1. Classification: Classification can be used to predict the final grade band of a student from their "
    "study habits and academic performance. The target variable is final_grade.\n\n"
    "2. Regression: Regression can be used to predict a student's average test score from their study hours, "
    "attendance and participation.\n\n"
    "The rationale for choosing classification is that it can help identify students who are at risk of failing "
    "early. The rationale for choosing regression is that it shows which habits contribute most to test scores."
)

EMPTY = {
    "problem_type": "classification",
    "target_variable": None,
    "features": None,
    "dataset_size": None,
    "performance_metrics": None,
    "validation_method": None,
    "classification_methods": None,
    "data_filters": [
        {"column": None, "condition": None, "value": None},
        {"column": None, "condition": None, "value": None},
    ],
    "business_goals": None,
    "additional_requirements": None,
    "model_preferences": None,
}

SELECTOR_REASON = (
    "The dataset summary suggested classification to predict the final grade of a student and the user "
    "agreed that classification would be a good choice. Therefore, a classification model is a good choice "
    "for this task."
)

# (utterance, feeder patch, seeker question or None when the descriptor runs, manager reply)
FORMULATION = [
    ("I think I will use final grade",
     {"target_variable": "final_grade"},
     "Can you please provide the size of your dataset for the Classification model you are building?",
     "Based on the provided context, the next unidentified slot is dataset_size. Can you please provide the "
     "size of your dataset for the Classification model you are building?"),
    ("Lets use 10000 samples for this task",
     {"dataset_size": 10000},
     "Which columns should the model use as input features?",
     "Noted, up to 10000 samples. Which columns should the model use as input features?"),
    ("Use study hours, attendance, participation, homework scores and test scores",
     {"features": ["study_hours", "attendance", "participation", "homework_scores", "test_scores"]},
     "Which performance metrics would you like to evaluate the model with?",
     "Great, five features. Which performance metrics would you like to evaluate the model with?"),
    ("Accuracy, F1 score and the confusion matrix",
     {"performance_metrics": ["accuracy", "f1_score", "confusion_matrix"]},
     "How should the models be validated?",
     "Got it. How should the models be validated, for example with a holdout split or k-fold cross-validation?"),
    ("k-fold cross validation",
     {"validation_method": "k-fold cross-validation"},
     "Which classification methods should be compared?",
     "K-fold cross-validation it is. Which classification methods should be compared?"),
    ("Try random forest, SVM and logistic regression",
     {"classification_methods": ["random_forest_classifier", "svm_classifier", "logistic_regression"]},
     "Should the data be filtered before training?",
     "Three methods noted. Should the data be filtered before training? These remaining details are optional."),
    ("Only keep students with attendance above 75 and study hours more than 1",
     {"data_filters": [
         {"column": "attendance", "condition": "greater_than", "value": 75},
         {"column": "study_hours", "condition": "greater_than", "value": 1},
     ]},
     "What business goal does this model serve?",
     "Both filters are set. What business goal does this model serve?"),
    ("I want to predict student performance to implement early interventions for students at risk of failing",
     {"business_goals": [
         "predict student performance to implement early interventions for students at risk of failing"]},
     "Are there any additional requirements for the model?",
     "That is a valuable goal. Are there any additional requirements for the model?"),
    ("The model needs to be interpretable",
     {"additional_requirements": ["model interpretability"]},
     "Do you have any preference about the models?",
     "Understood. Do you have any preference about the models?"),
    ("I prefer higher accuracy but it should stay interpretable",
     {"model_preferences": "higher accuracy, interpretable"},
     None,
     None),
]

DESCRIPTION = (
    "The task is to predict the final_grade of a student based on various features like study_hours, "
    "attendance, participation, homework_scores, and test_scores. This is a classification problem with up "
    "to 10000 samples. Performance is measured using accuracy, F1 score, and the confusion matrix. K-fold "
    "cross-validation is used for validation. Three classification methods are considered: random forest, "
    "SVM, and logistic regression. The data is filtered to only include records where attendance is greater "
    "than 75 and study_hours is more than 1. The business goal is to predict student performance to implement "
    "early interventions for those at risk of failing. Model interpretability is an important additional "
    "requirement, and there is a preference for models with higher accuracy that stay interpretable."
)

CONFIRM = "That seems all right to me. go ahead with this task."


def entry(agent, reply):
    return {"match": {"agent": agent}, "reply": reply}


def detector(intent, current, nxt):
    return json.dumps({"intent": intent, "current_state": current, "next_state": nxt})


def context_after(turn):
    return (f"The user uploaded a student performance dataset, chose classification with final_grade as the "
            f"target and has answered {turn - 1} formulation questions so far.")


def build():
    script = [
        entry("dataset_summarizer", json.dumps(SUMMARY)),
        entry("task_suggestor", TASKS),
    ]
    utterances = ["Ok, from the description it seems like classification is a good choice."]
    # Turn 1: data_visualization -> task_selection. History is empty, so no summarizer call.
    script += [
        entry("state_detector", detector("Select problem", "data_visualization", "task_selection")),
        entry("task_selector", json.dumps({"model": "classification", "reason": SELECTOR_REASON})),
        entry("conversation_manager",
              "Great! Let's move forward with the classification task. Now that we have decided on the "
              "classification task, let's move on to formulating the problem. Can you provide me with more "
              "details on what you would like to achieve with this task? For example, what is the target "
              "variable you would like to predict?"),
    ]

    petel = copy.deepcopy(EMPTY)
    turn = 1
    for i, (utt, patch, question, reply) in enumerate(FORMULATION):
        turn += 1
        utterances.append(utt)
        current = "task_selection" if i == 0 else "task_formulation"
        script.append(entry("state_detector", detector("Formulate problem", current, "task_formulation")))
        petel.update(patch)
        script.append(entry("feeder", json.dumps(petel)))
        if question is not None:
            script.append(entry("seeker", question))
            script.append(entry("conversation_manager", reply))
        else:
            script.append(entry("descriptor", DESCRIPTION))
            script.append(entry("conversation_manager",
                                DESCRIPTION + "\n\nDoes this formulation look right? Say go ahead and I will "
                                "train the models."))
        script.append(entry("dialogue_summarizer", context_after(turn)))

    turn += 1
    utterances.append(CONFIRM)
    script += [
        entry("state_detector", detector("Problem execution", "task_formulation", "model_training")),
        entry("conversation_manager",
              "Training is done. Random forest, SVM and logistic regression are not available on the builtin "
              "backend, so majority_class_baseline was scored instead and it is the recommended model for now. "
              "Connect a training backend to compare the requested methods."),
        entry("dialogue_summarizer",
              "The user formulated a classification task on final_grade with two filters, confirmed it, and "
              "the models were trained."),
    ]
    return script, utterances, petel


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    script, utterances, golden = build()
    with open(OUT / "student_session.script.jsonl", "w", encoding="utf-8") as f:
        for e in script:
            f.write(json.dumps(e) + "\n")
    with open(OUT / "student_session.turns.json", "w", encoding="utf-8") as f:
        json.dump({"dataset": "data/fixtures/student_performance.csv", "utterances": utterances}, f, indent=2)
        f.write("\n")
    with open(OUT / "student_session.golden.json", "w", encoding="utf-8") as f:
        json.dump(golden, f, indent=2)
        f.write("\n")
    print(f"{len(script)} script entries, {len(utterances)} utterances")


if __name__ == "__main__":
    main()
