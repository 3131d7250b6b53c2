"""Prompt and instruction text used by the sourcing, inference, rerank, and reader stages.

These strings are load-bearing: golden tests pin them byte-for-byte, so any
edit here must update tests/golden/ in the same change.
"""

# ---------------------------------------------------------------- sourcing

MEDICAL_FILTER_PROMPT = (
    "You are an expert in maternal and infant health who specializes in finding out "
    "whether a question posed by a new or expecting mother is seeking opinion/community "
    "participation, or whether it is a medical question. Given a question, you must "
    "answer whether it is question seeking medical advice or if it is seeking personal "
    "anecdotes and sharing experience. If it's seeking medical advice, answer with "
    '"medical". Otherwise, answer "non-medical". If a question is under-specified, '
    'answer with "non-medical".'
)

TITLE_REWRITE_PROMPT = (
    "You will be shown questions about maternal and infant health asked by users. "
    "Each question contains a TITLE and DESCRIPTION that elaborates on it, containing "
    "details that are both relevant and irrelevant to answering the question. Given a "
    "question TITLE and a DESCRIPTION, your task is to incorporate only the relevant "
    "details from the DESCRIPTION and rewrite the TITLE into a REWRITE. If there are "
    "no relevant details, return the TITLE. As a general rule, keep the rewrite as "
    "similar to the original question as possible. The rewrite should be a question "
    "in a single sentence."
)

# ---------------------------------------------------------------- inference

CONSOLIDATION_PROMPT = (
    "Given questions asked by new or expecting mothers, your task is to identify the "
    "assumptions in them. For this task, you will be given a QUESTION asked by a new "
    "or expecting mother, some ASSUMPTIONS (as a list of beliefs or assumptions) in "
    "those questions identified by health experts, and some possible SUBQUESTIONS (as "
    "a list) that public health experts have identified to have the same information "
    "goals as the original question. Given all three of these, your task is to "
    "consolidate the SUBQUESTIONS and ASSUMPTIONS into a single, exhaustive list, "
    "called INFERENCES. Turning a SUBQUESTION into an inference may involve just "
    "turning it into a declarative sentence, or identifying the assumptions made in "
    "the SUBQUESTION. Finally, add the INFERENCES to the list of ASSUMPTIONS and "
    "remove any duplicates."
)

INFERENCE_GENERATION_PROMPT = (
    "When humans ask questions, they often have certain assumptions or implications "
    "that are embedded in the questions. These assumptions and implications may be "
    "true or false, and they may or may not be present in the surface form of the "
    "question. Given a question asked by a new or expecting mother, your task is to "
    "identify all relevant assumptions and implications in these questions and write "
    "them in a list titled INFERENCES. Each inference under INFERENCES should be an "
    "independent and declarative assertion that represents an assumption or an "
    "implication that the speaker makes while asking the question."
)

# ---------------------------------------------------------------- reranker

RERANK_QUESTION_INSTRUCTION = (
    "Retrieve a passage from medical articles on the web that answers the following "
    "question."
)

RERANK_ASSUMPTION_INSTRUCTION = (
    "I want to check if the following assumption is true or false. Retrieve an "
    "evidence passage for me from medical articles on the web."
)

# ---------------------------------------------------------------- readers
#
# {context} is the numbered source block, {question} the user question, and
# {assumptions} a "-" bulleted list. Labels sit on their own line so multi-line
# blocks read cleanly.

READER_BASELINE_TEMPLATE = """\
You are an expert in maternal and infant health. You are given a few verified pieces of information below:

Context:
{context}

Using evidence only from verified pieces of information above, respond to the following question with a helpful and complete answer. Use information from multiple sources above if necessary to answer the question. In your answer, do not reveal that you are fetching information from these pieces of evidence. Use information only from the verified sources above, and not from any other sources.

Question: {question}
Answer:"""

READER_AUGMENTED_TEMPLATE = """\
You are an expert in maternal and infant health. You are given a few verified pieces of information below:

Context:
{context}

Using information only from verified pieces of information above, respond to the following question with a helpful and complete answer. As humans often make assumptions while asking questions, your answer must address assumptions made by the asker listed below.

Assumptions:
{assumptions}

Use information from multiple sources above if necessary to answer the question below and address the ASSUMPTIONS. In your answer, do not reveal that you are fetching information from these pieces of evidence. Use information only from the verified sources above, and not from any other sources.
Question: {question}
Answer:"""

READER_EXTRACTIVE_TEMPLATE = """\
You are an expert in maternal and infant health. You are given a few passages below:

Context:
{context}

Using information only from the passages above, respond to the following question with a helpful and complete answer. Use information from multiple passages if necessary to answer the question. Again, you are allowed to only use information from the passages above.

Question: {question}"""
